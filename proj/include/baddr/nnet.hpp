#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "baddr/pomdp.hpp"
#include "baddr/rng.hpp"

namespace baddr {

/// Layer sizes and output head layout of a fully connected tanh network.
///
/// Parameters live in one flat vector. Layer l stores its weights as an
/// (in x out) row-major block, so row i holds the outgoing weights of input
/// unit i, followed by its `out` biases.
class MlpShape {
public:
    MlpShape(std::vector<int> layer_sizes, std::vector<int> output_blocks);

    const std::vector<int>& layer_sizes() const noexcept { return layer_sizes_; }
    const std::vector<int>& output_blocks() const noexcept { return output_blocks_; }

    int layer_count() const noexcept { return static_cast<int>(layer_sizes_.size()) - 1; }
    int input_size() const noexcept { return layer_sizes_.front(); }
    int output_size() const noexcept { return layer_sizes_.back(); }
    int hidden_units() const noexcept { return hidden_units_; }
    int hidden_offset(int hidden_layer) const { return hidden_offsets_[static_cast<std::size_t>(hidden_layer)]; }

    std::size_t weight_offset(int layer) const { return weight_offsets_[static_cast<std::size_t>(layer)]; }
    std::size_t bias_offset(int layer) const { return bias_offsets_[static_cast<std::size_t>(layer)]; }
    std::size_t param_count() const noexcept { return param_count_; }

    bool operator==(const MlpShape& other) const {
        return layer_sizes_ == other.layer_sizes_ && output_blocks_ == other.output_blocks_;
    }

private:
    std::vector<int> layer_sizes_;
    std::vector<int> output_blocks_;
    std::vector<std::size_t> weight_offsets_;
    std::vector<std::size_t> bias_offsets_;
    std::vector<int> hidden_offsets_;
    int hidden_units_ = 0;
    std::size_t param_count_ = 0;
};

/// Weights of one network. Copying copies the parameters; the shape is shared.
class Mlp {
public:
    Mlp(std::shared_ptr<const MlpShape> shape, std::vector<double> params);

    /// Uniform in ±sqrt(6 / (fan_in + fan_out)); zero biases.
    static Mlp glorot(std::shared_ptr<const MlpShape> shape, RngStream& rng);

    const MlpShape& shape() const noexcept { return *shape_; }
    const std::shared_ptr<const MlpShape>& shape_ptr() const noexcept { return shape_; }

    std::span<const double> params() const noexcept { return params_; }
    std::span<double> params() noexcept { return params_; }

    std::span<const double> weights(int layer) const;
    std::span<const double> biases(int layer) const;

    bool all_finite() const noexcept;

private:
    std::shared_ptr<const MlpShape> shape_;
    std::vector<double> params_;
};

/// Keep flags for every hidden unit, hidden layers concatenated. An empty
/// mask keeps everything.
struct DropoutMask {
    std::vector<std::uint8_t> keep;

    bool keeps_all() const noexcept;
    static DropoutMask all_keep(const MlpShape& shape);
};

/// Each hidden unit kept independently with probability 1 - p_drop.
DropoutMask sample_mask(const MlpShape& shape, double p_drop, RngStream& rng);
void sample_mask_into(const MlpShape& shape, double p_drop, RngStream& rng, DropoutMask& mask);

/// Per-block softmax of the masked network, written into `probs`.
/// Throws std::invalid_argument on size mismatches.
void forward(const Mlp& net, std::span<const double> input, const DropoutMask& mask, std::span<double> probs);
std::vector<double> forward(const Mlp& net, std::span<const double> input, const DropoutMask& mask);

/// Summed per-block cross-entropy of `targets` (one category per output block).
double cross_entropy(const Mlp& net, std::span<const double> input, std::span<const int> targets,
                     const DropoutMask& mask);

/// Cross-entropy plus its exact gradient, which is *added* to `gradient`.
double loss_and_gradient(const Mlp& net, std::span<const double> input, std::span<const int> targets,
                         const DropoutMask& mask, std::span<double> gradient);

// ---------------------------------------------------------------------------
// Optimizers

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
    double learning_rate = 0.1;
    OptimizerKind optimizer = OptimizerKind::sgd;
    int batch_size = 32;
    int batches = 0;

    void validate() const;
};

/// Adam moments; unused by SGD.
struct OptimizerState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::int64_t step = 0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// Descent step: sgd θ ← θ − α g; adam with bias-corrected moments.
void apply_update_in_place(std::span<double> params, std::span<const double> gradient, const TrainConfig& cfg,
                           OptimizerState& state);
Mlp apply_update(const Mlp& net, std::span<const double> gradient, const TrainConfig& cfg, OptimizerState& state);

// ---------------------------------------------------------------------------
// Transition/observation network pair

/// f_T: onehot(s, a) → per-state-feature logits;
/// f_O: onehot(s, a, s') → per-observation-feature logits.
struct NetPair {
    Mlp transition;
    Mlp observation;
    double p_drop = 0.0;
};

struct PairMask {
    DropoutMask transition;
    DropoutMask observation;
};

PairMask sample_pair_mask(const NetPair& pair, RngStream& rng);

/// `weight_layers` counts weight matrices, so a value of 3 gives two hidden
/// layers of `hidden_nodes` units.
NetPair make_net_pair(const PomdpSpec& spec, int weight_layers, int hidden_nodes, double p_drop, RngStream& rng);

int transition_input_size(const PomdpSpec& spec);
int observation_input_size(const PomdpSpec& spec);
void encode_transition_input(const PomdpSpec& spec, std::span<const int> state, int action, std::span<double> out);
void encode_observation_input(const PomdpSpec& spec, std::span<const int> state, int action,
                              std::span<const int> next, std::span<double> out);

/// Draws s' then o feature by feature from the masked pair.
void sample_from_pair(const NetPair& pair, const PairMask& mask, const PomdpSpec& spec, std::span<const int> state,
                      int action, RngStream& rng, FeatureValues& next, FeatureValues& observation);

/// Draws s' feature by feature from the masked transition network.
void sample_transition(const Mlp& transition, const DropoutMask& mask, const PomdpSpec& spec,
                       std::span<const int> state, int action, RngStream& rng, FeatureValues& next);

/// Probability of `observation` under the masked observation network.
double pair_observation_probability(const NetPair& pair, const DropoutMask& mask, const PomdpSpec& spec,
                                    std::span<const int> state, int action, std::span<const int> next,
                                    std::span<const int> observation);

/// -log p(s', o | s, a; masked pair) with gradients added into the two
/// buffers (sized like each net's parameters).
double pair_loss_and_gradient(const NetPair& pair, const PairMask& mask, const PomdpSpec& spec,
                              std::span<const int> state, int action, std::span<const int> next,
                              std::span<const int> observation, std::span<double> transition_gradient,
                              std::span<double> observation_gradient);

/// MC-dropout estimate of the joint p(s', o | s, a), indexed
/// flat(s') * |O| + flat(o). Enumerates the joint space; tiny domains only.
std::vector<double> mc_predict(const NetPair& pair, const PomdpSpec& spec, std::span<const int> state, int action,
                               int n_samples, RngStream& rng);

/// Supervised training on (s, a) drawn uniformly and (s', o) from
/// `simulator`; masks resampled per example; gradient averaged per batch.
NetPair pretrain_member(const Pomdp& simulator, const TrainConfig& cfg, NetPair pair, RngStream& rng);

// ---------------------------------------------------------------------------
// Checkpoints

void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(std::istream& in);
void write_net_pair(std::ostream& out, const NetPair& pair);
NetPair read_net_pair(std::istream& in);
void save_net_pair(const std::string& path, const NetPair& pair);
NetPair load_net_pair(const std::string& path);

}  // namespace baddr
