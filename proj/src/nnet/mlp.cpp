#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "baddr/nnet.hpp"

namespace baddr {

MlpShape::MlpShape(std::vector<int> layer_sizes, std::vector<int> output_blocks)
    : layer_sizes_(std::move(layer_sizes)), output_blocks_(std::move(output_blocks)) {
    if (layer_sizes_.size() < 2) throw std::invalid_argument("an MLP needs at least an input and an output layer");
    for (int s : layer_sizes_)
        if (s < 1) throw std::invalid_argument("MLP layer sizes must be positive");
    const int blocks = std::accumulate(output_blocks_.begin(), output_blocks_.end(), 0);
    if (output_blocks_.empty() || blocks != layer_sizes_.back())
        throw std::invalid_argument("MLP output blocks must partition the output layer");
    for (int b : output_blocks_)
        if (b < 1) throw std::invalid_argument("MLP output blocks must be non-empty");

    for (int l = 0; l < layer_count(); ++l) {
        const auto in = static_cast<std::size_t>(layer_sizes_[static_cast<std::size_t>(l)]);
        const auto out = static_cast<std::size_t>(layer_sizes_[static_cast<std::size_t>(l) + 1]);
        weight_offsets_.push_back(param_count_);
        param_count_ += in * out;
        bias_offsets_.push_back(param_count_);
        param_count_ += out;
    }
    for (int l = 1; l < layer_count(); ++l) {
        hidden_offsets_.push_back(hidden_units_);
        hidden_units_ += layer_sizes_[static_cast<std::size_t>(l)];
    }
}

Mlp::Mlp(std::shared_ptr<const MlpShape> shape, std::vector<double> params)
    : shape_(std::move(shape)), params_(std::move(params)) {
    if (!shape_) throw std::invalid_argument("MLP shape is null");
    if (params_.size() != shape_->param_count())
        throw std::invalid_argument("MLP parameter count " + std::to_string(params_.size()) + " does not match shape (" +
                                    std::to_string(shape_->param_count()) + ")");
}

Mlp Mlp::glorot(std::shared_ptr<const MlpShape> shape, RngStream& rng) {
    std::vector<double> params(shape->param_count(), 0.0);
    for (int l = 0; l < shape->layer_count(); ++l) {
        const int in = shape->layer_sizes()[static_cast<std::size_t>(l)];
        const int out = shape->layer_sizes()[static_cast<std::size_t>(l) + 1];
        const double limit = std::sqrt(6.0 / (in + out));
        const std::size_t base = shape->weight_offset(l);
        for (std::size_t k = 0; k < static_cast<std::size_t>(in) * static_cast<std::size_t>(out); ++k)
            params[base + k] = (2.0 * rng.uniform() - 1.0) * limit;
    }
    return Mlp(std::move(shape), std::move(params));
}

std::span<const double> Mlp::weights(int layer) const {
    const auto in = static_cast<std::size_t>(shape_->layer_sizes()[static_cast<std::size_t>(layer)]);
    const auto out = static_cast<std::size_t>(shape_->layer_sizes()[static_cast<std::size_t>(layer) + 1]);
    return std::span<const double>(params_).subspan(shape_->weight_offset(layer), in * out);
}

std::span<const double> Mlp::biases(int layer) const {
    const auto out = static_cast<std::size_t>(shape_->layer_sizes()[static_cast<std::size_t>(layer) + 1]);
    return std::span<const double>(params_).subspan(shape_->bias_offset(layer), out);
}

bool Mlp::all_finite() const noexcept {
    return std::all_of(params_.begin(), params_.end(), [](double x) { return std::isfinite(x); });
}

bool DropoutMask::keeps_all() const noexcept {
    return std::all_of(keep.begin(), keep.end(), [](std::uint8_t k) { return k != 0; });
}

DropoutMask DropoutMask::all_keep(const MlpShape& shape) {
    return DropoutMask{std::vector<std::uint8_t>(static_cast<std::size_t>(shape.hidden_units()), 1)};
}

void sample_mask_into(const MlpShape& shape, double p_drop, RngStream& rng, DropoutMask& mask) {
    mask.keep.resize(static_cast<std::size_t>(shape.hidden_units()));
    if (p_drop <= 0.0) {
        std::fill(mask.keep.begin(), mask.keep.end(), std::uint8_t{1});
        return;
    }
    for (auto& k : mask.keep) k = rng.uniform() >= p_drop ? 1 : 0;
}

DropoutMask sample_mask(const MlpShape& shape, double p_drop, RngStream& rng) {
    if (!(p_drop >= 0.0 && p_drop < 1.0)) throw std::invalid_argument("dropout probability must lie in [0, 1)");
    DropoutMask mask;
    sample_mask_into(shape, p_drop, rng, mask);
    return mask;
}

namespace {

// Activations of every layer of the last forward pass; index 0 is the input.
struct Trace {
    std::vector<std::vector<double>> activations;
    std::vector<double> logits;
};

thread_local Trace scratch_trace;

void check_forward_args(const Mlp& net, std::span<const double> input, const DropoutMask& mask) {
    const MlpShape& shape = net.shape();
    if (static_cast<int>(input.size()) != shape.input_size())
        throw std::invalid_argument("MLP input has " + std::to_string(input.size()) + " entries, expected " +
                                    std::to_string(shape.input_size()));
    if (!mask.keep.empty() && static_cast<int>(mask.keep.size()) != shape.hidden_units())
        throw std::invalid_argument("dropout mask does not match the network's hidden units");
}

// Masked forward pass; leaves activations in `trace` and log-probabilities
// per block in trace.logits.
void run_forward(const Mlp& net, std::span<const double> input, const DropoutMask& mask, Trace& trace) {
    const MlpShape& shape = net.shape();
    const int layers = shape.layer_count();
    const auto params = net.params();
    const bool masked = !mask.keep.empty();
    trace.activations.resize(static_cast<std::size_t>(layers));
    trace.activations[0].assign(input.begin(), input.end());
    for (int l = 0; l < layers; ++l) {
        const auto in = static_cast<std::size_t>(shape.layer_sizes()[static_cast<std::size_t>(l)]);
        const auto out = static_cast<std::size_t>(shape.layer_sizes()[static_cast<std::size_t>(l) + 1]);
        const double* w = params.data() + shape.weight_offset(l);
        const double* b = params.data() + shape.bias_offset(l);
        const std::vector<double>& x = trace.activations[static_cast<std::size_t>(l)];
        std::vector<double>& z = l + 1 < layers ? trace.activations[static_cast<std::size_t>(l) + 1] : trace.logits;
        z.assign(b, b + out);
        double* zp = z.data();
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            const double* row = w + i * out;
            for (std::size_t j = 0; j < out; ++j) zp[j] += xi * row[j];
        }
        if (l + 1 < layers) {
            const std::uint8_t* keep = masked ? mask.keep.data() + shape.hidden_offset(l) : nullptr;
            for (std::size_t j = 0; j < out; ++j) zp[j] = (keep && !keep[j]) ? 0.0 : std::tanh(zp[j]);
        }
    }
    // Logits to log-probabilities, block by block.
    double* y = trace.logits.data();
    for (int block : shape.output_blocks()) {
        double top = y[0];
        for (int k = 1; k < block; ++k) top = std::max(top, y[k]);
        double sum = 0.0;
        for (int k = 0; k < block; ++k) sum += std::exp(y[k] - top);
        const double log_norm = top + std::log(sum);
        for (int k = 0; k < block; ++k) y[k] -= log_norm;
        y += block;
    }
}

void check_targets(const MlpShape& shape, std::span<const int> targets) {
    if (targets.size() != shape.output_blocks().size())
        throw std::invalid_argument("target count does not match the network's output blocks");
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (targets[i] < 0 || targets[i] >= shape.output_blocks()[i])
            throw std::out_of_range("target category outside its output block");
}

}  // namespace

void forward(const Mlp& net, std::span<const double> input, const DropoutMask& mask, std::span<double> probs) {
    check_forward_args(net, input, mask);
    if (static_cast<int>(probs.size()) != net.shape().output_size())
        throw std::invalid_argument("output buffer does not match the network's output size");
    run_forward(net, input, mask, scratch_trace);
    for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = std::exp(scratch_trace.logits[k]);
}

std::vector<double> forward(const Mlp& net, std::span<const double> input, const DropoutMask& mask) {
    std::vector<double> probs(static_cast<std::size_t>(net.shape().output_size()));
    forward(net, input, mask, probs);
    return probs;
}

double cross_entropy(const Mlp& net, std::span<const double> input, std::span<const int> targets,
                     const DropoutMask& mask) {
    check_forward_args(net, input, mask);
    check_targets(net.shape(), targets);
    run_forward(net, input, mask, scratch_trace);
    double loss = 0.0;
    int offset = 0;
    for (std::size_t b = 0; b < targets.size(); ++b) {
        loss -= scratch_trace.logits[static_cast<std::size_t>(offset + targets[b])];
        offset += net.shape().output_blocks()[b];
    }
    return loss;
}

double loss_and_gradient(const Mlp& net, std::span<const double> input, std::span<const int> targets,
                         const DropoutMask& mask, std::span<double> gradient) {
    const MlpShape& shape = net.shape();
    check_forward_args(net, input, mask);
    check_targets(shape, targets);
    if (gradient.size() != shape.param_count()) throw std::invalid_argument("gradient buffer has the wrong size");

    Trace& trace = scratch_trace;
    run_forward(net, input, mask, trace);

    // dL/dlogits = softmax - onehot(target), per block.
    thread_local std::vector<double> delta;
    thread_local std::vector<double> delta_prev;
    delta.resize(static_cast<std::size_t>(shape.output_size()));
    double loss = 0.0;
    int offset = 0;
    for (std::size_t b = 0; b < targets.size(); ++b) {
        const int block = shape.output_blocks()[b];
        for (int k = 0; k < block; ++k)
            delta[static_cast<std::size_t>(offset + k)] = std::exp(trace.logits[static_cast<std::size_t>(offset + k)]);
        const auto t = static_cast<std::size_t>(offset + targets[b]);
        loss -= trace.logits[t];
        delta[t] -= 1.0;
        offset += block;
    }

    const auto params = net.params();
    const bool masked = !mask.keep.empty();
    for (int l = shape.layer_count() - 1; l >= 0; --l) {
        const auto in = static_cast<std::size_t>(shape.layer_sizes()[static_cast<std::size_t>(l)]);
        const auto out = static_cast<std::size_t>(shape.layer_sizes()[static_cast<std::size_t>(l) + 1]);
        const std::vector<double>& x = trace.activations[static_cast<std::size_t>(l)];
        double* gw = gradient.data() + shape.weight_offset(l);
        double* gb = gradient.data() + shape.bias_offset(l);
        const double* w = params.data() + shape.weight_offset(l);
        const double* d = delta.data();
        for (std::size_t j = 0; j < out; ++j) gb[j] += d[j];
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            double* row = gw + i * out;
            for (std::size_t j = 0; j < out; ++j) row[j] += xi * d[j];
        }
        if (l == 0) break;
        // Back through tanh and the mask of hidden layer l-1.
        delta_prev.assign(in, 0.0);
        const std::uint8_t* keep = masked ? mask.keep.data() + shape.hidden_offset(l - 1) : nullptr;
        for (std::size_t i = 0; i < in; ++i) {
            if (keep && !keep[i]) continue;
            const double* row = w + i * out;
            double s = 0.0;
            for (std::size_t j = 0; j < out; ++j) s += row[j] * d[j];
            delta_prev[i] = s * (1.0 - x[i] * x[i]);
        }
        delta.swap(delta_prev);
    }
    return loss;
}

}  // namespace baddr
