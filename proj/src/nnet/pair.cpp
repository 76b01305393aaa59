#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "baddr/nnet.hpp"

namespace baddr {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
    if (batches < 0) throw std::invalid_argument("batch count must be non-negative");
}

void apply_update_in_place(std::span<double> params, std::span<const double> gradient, const TrainConfig& cfg,
                           OptimizerState& state) {
    if (params.size() != gradient.size()) throw std::invalid_argument("gradient does not match parameter count");
    const double lr = cfg.learning_rate;
    if (cfg.optimizer == OptimizerKind::sgd) {
        for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr * gradient[k];
        return;
    }
    if (state.first_moment.size() != params.size()) {
        state.first_moment.assign(params.size(), 0.0);
        state.second_moment.assign(params.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = gradient[k];
        double& m = state.first_moment[k];
        double& v = state.second_moment[k];
        m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
        v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * g * g;
        params[k] -= lr * (m / c1) / (std::sqrt(v / c2) + kAdamEpsilon);
    }
}

Mlp apply_update(const Mlp& net, std::span<const double> gradient, const TrainConfig& cfg, OptimizerState& state) {
    Mlp out = net;
    apply_update_in_place(out.params(), gradient, cfg, state);
    return out;
}

int transition_input_size(const PomdpSpec& spec) { return spec.state_space.onehot_width() + spec.action_count; }

int observation_input_size(const PomdpSpec& spec) {
    return 2 * spec.state_space.onehot_width() + spec.action_count;
}

void encode_transition_input(const PomdpSpec& spec, std::span<const int> state, int action, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    onehot_write(spec.state_space, state, out, 0);
    out[static_cast<std::size_t>(spec.state_space.onehot_width() + action)] = 1.0;
}

void encode_observation_input(const PomdpSpec& spec, std::span<const int> state, int action,
                              std::span<const int> next, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const int width = spec.state_space.onehot_width();
    onehot_write(spec.state_space, state, out, 0);
    out[static_cast<std::size_t>(width + action)] = 1.0;
    onehot_write(spec.state_space, next, out, static_cast<std::size_t>(width + spec.action_count));
}

NetPair make_net_pair(const PomdpSpec& spec, int weight_layers, int hidden_nodes, double p_drop, RngStream& rng) {
    if (weight_layers < 1) throw std::invalid_argument("a network needs at least one weight layer");
    if (!(p_drop >= 0.0 && p_drop < 1.0)) throw std::invalid_argument("dropout probability must lie in [0, 1)");
    auto sizes = [&](int input, int output) {
        std::vector<int> s{input};
        for (int l = 1; l < weight_layers; ++l) s.push_back(hidden_nodes);
        s.push_back(output);
        return s;
    };
    auto t_shape = std::make_shared<const MlpShape>(
        sizes(transition_input_size(spec), spec.state_space.onehot_width()), spec.state_space.cardinalities());
    auto o_shape = std::make_shared<const MlpShape>(
        sizes(observation_input_size(spec), spec.observation_space.onehot_width()),
        spec.observation_space.cardinalities());
    Mlp t = Mlp::glorot(std::move(t_shape), rng);
    Mlp o = Mlp::glorot(std::move(o_shape), rng);
    return NetPair{std::move(t), std::move(o), p_drop};
}

PairMask sample_pair_mask(const NetPair& pair, RngStream& rng) {
    PairMask mask;
    sample_mask_into(pair.transition.shape(), pair.p_drop, rng, mask.transition);
    sample_mask_into(pair.observation.shape(), pair.p_drop, rng, mask.observation);
    return mask;
}

namespace {

struct PairScratch {
    std::vector<double> t_input;
    std::vector<double> o_input;
    std::vector<double> t_probs;
    std::vector<double> o_probs;
};

thread_local PairScratch pair_scratch;

void sample_blocks(std::span<const double> probs, const FeatureSpace& space, RngStream& rng, FeatureValues& out) {
    out.resize(space.feature_count());
    for (std::size_t f = 0; f < space.feature_count(); ++f) {
        const auto off = static_cast<std::size_t>(space.offset(f));
        const auto card = static_cast<std::size_t>(space.cardinality(f));
        out[f] = static_cast<int>(rng.categorical(probs.subspan(off, card)));
    }
}

}  // namespace

void sample_from_pair(const NetPair& pair, const PairMask& mask, const PomdpSpec& spec, std::span<const int> state,
                      int action, RngStream& rng, FeatureValues& next, FeatureValues& observation) {
    PairScratch& s = pair_scratch;
    s.t_input.resize(static_cast<std::size_t>(transition_input_size(spec)));
    s.o_input.resize(static_cast<std::size_t>(observation_input_size(spec)));
    s.t_probs.resize(static_cast<std::size_t>(spec.state_space.onehot_width()));
    s.o_probs.resize(static_cast<std::size_t>(spec.observation_space.onehot_width()));
    encode_transition_input(spec, state, action, s.t_input);
    forward(pair.transition, s.t_input, mask.transition, s.t_probs);
    sample_blocks(s.t_probs, spec.state_space, rng, next);
    encode_observation_input(spec, state, action, next, s.o_input);
    forward(pair.observation, s.o_input, mask.observation, s.o_probs);
    sample_blocks(s.o_probs, spec.observation_space, rng, observation);
}

void sample_transition(const Mlp& transition, const DropoutMask& mask, const PomdpSpec& spec,
                       std::span<const int> state, int action, RngStream& rng, FeatureValues& next) {
    PairScratch& s = pair_scratch;
    s.t_input.resize(static_cast<std::size_t>(transition_input_size(spec)));
    s.t_probs.resize(static_cast<std::size_t>(spec.state_space.onehot_width()));
    encode_transition_input(spec, state, action, s.t_input);
    forward(transition, s.t_input, mask, s.t_probs);
    sample_blocks(s.t_probs, spec.state_space, rng, next);
}

double pair_observation_probability(const NetPair& pair, const DropoutMask& mask, const PomdpSpec& spec,
                                    std::span<const int> state, int action, std::span<const int> next,
                                    std::span<const int> observation) {
    PairScratch& s = pair_scratch;
    s.o_input.resize(static_cast<std::size_t>(observation_input_size(spec)));
    s.o_probs.resize(static_cast<std::size_t>(spec.observation_space.onehot_width()));
    encode_observation_input(spec, state, action, next, s.o_input);
    forward(pair.observation, s.o_input, mask, s.o_probs);
    double p = 1.0;
    for (std::size_t f = 0; f < observation.size(); ++f)
        p *= s.o_probs[static_cast<std::size_t>(spec.observation_space.offset(f) + observation[f])];
    return p;
}

double pair_loss_and_gradient(const NetPair& pair, const PairMask& mask, const PomdpSpec& spec,
                              std::span<const int> state, int action, std::span<const int> next,
                              std::span<const int> observation, std::span<double> transition_gradient,
                              std::span<double> observation_gradient) {
    PairScratch& s = pair_scratch;
    s.t_input.resize(static_cast<std::size_t>(transition_input_size(spec)));
    s.o_input.resize(static_cast<std::size_t>(observation_input_size(spec)));
    encode_transition_input(spec, state, action, s.t_input);
    encode_observation_input(spec, state, action, next, s.o_input);
    const double lt = loss_and_gradient(pair.transition, s.t_input, next, mask.transition, transition_gradient);
    const double lo =
        loss_and_gradient(pair.observation, s.o_input, observation, mask.observation, observation_gradient);
    return lt + lo;
}

std::vector<double> mc_predict(const NetPair& pair, const PomdpSpec& spec, std::span<const int> state, int action,
                               int n_samples, RngStream& rng) {
    if (n_samples < 1) throw std::invalid_argument("mc_predict needs at least one sample");
    const std::uint64_t n_next = spec.state_space.joint_size();
    const std::uint64_t n_obs = spec.observation_space.joint_size();
    std::vector<double> joint(static_cast<std::size_t>(n_next * n_obs), 0.0);
    std::vector<double> t_input(static_cast<std::size_t>(transition_input_size(spec)));
    std::vector<double> o_input(static_cast<std::size_t>(observation_input_size(spec)));
    std::vector<double> t_probs(static_cast<std::size_t>(spec.state_space.onehot_width()));
    std::vector<double> o_probs(static_cast<std::size_t>(spec.observation_space.onehot_width()));
    encode_transition_input(spec, state, action, t_input);
    const double scale = 1.0 / n_samples;
    for (int n = 0; n < n_samples; ++n) {
        const PairMask mask = sample_pair_mask(pair, rng);
        forward(pair.transition, t_input, mask.transition, t_probs);
        for (std::uint64_t si = 0; si < n_next; ++si) {
            const FeatureValues next = spec.state_space.unflatten(si);
            double p_next = 1.0;
            for (std::size_t f = 0; f < next.size(); ++f)
                p_next *= t_probs[static_cast<std::size_t>(spec.state_space.offset(f) + next[f])];
            if (p_next == 0.0) continue;
            encode_observation_input(spec, state, action, next, o_input);
            forward(pair.observation, o_input, mask.observation, o_probs);
            for (std::uint64_t oi = 0; oi < n_obs; ++oi) {
                const FeatureValues obs = spec.observation_space.unflatten(oi);
                double p_obs = 1.0;
                for (std::size_t g = 0; g < obs.size(); ++g)
                    p_obs *= o_probs[static_cast<std::size_t>(spec.observation_space.offset(g) + obs[g])];
                joint[static_cast<std::size_t>(si * n_obs + oi)] += scale * p_next * p_obs;
            }
        }
    }
    return joint;
}

NetPair pretrain_member(const Pomdp& simulator, const TrainConfig& cfg, NetPair pair, RngStream& rng) {
    cfg.validate();
    const PomdpSpec& spec = simulator.spec();
    std::vector<double> t_grad(pair.transition.shape().param_count());
    std::vector<double> o_grad(pair.observation.shape().param_count());
    OptimizerState t_state;
    OptimizerState o_state;
    PairMask mask;
    FeatureValues next;
    FeatureValues obs;
    const double scale = 1.0 / cfg.batch_size;
    for (int batch = 0; batch < cfg.batches; ++batch) {
        std::fill(t_grad.begin(), t_grad.end(), 0.0);
        std::fill(o_grad.begin(), o_grad.end(), 0.0);
        for (int k = 0; k < cfg.batch_size; ++k) {
            const FeatureValues state = spec.state_space.sample_uniform(rng);
            const int action = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(spec.action_count)));
            simulator.sample(state, action, rng, next, obs);
            sample_mask_into(pair.transition.shape(), pair.p_drop, rng, mask.transition);
            sample_mask_into(pair.observation.shape(), pair.p_drop, rng, mask.observation);
            pair_loss_and_gradient(pair, mask, spec, state, action, next, obs, t_grad, o_grad);
        }
        for (double& g : t_grad) g *= scale;
        for (double& g : o_grad) g *= scale;
        apply_update_in_place(pair.transition.params(), t_grad, cfg, t_state);
        apply_update_in_place(pair.observation.params(), o_grad, cfg, o_state);
    }
    return pair;
}

}  // namespace baddr
