#include <stdexcept>

#include "baddr/gba.hpp"

namespace baddr {

namespace {

const BaddrParams& baddr_of(const ModelParams& params) {
    const auto* p = dynamic_cast<const BaddrParams*>(&params);
    if (!p) throw std::invalid_argument("BaddrDynamics needs BaddrParams");
    return *p;
}

double transition_probability(const Mlp& net, const DropoutMask& mask, const PomdpSpec& spec,
                              std::span<const int> state, int action, std::span<const int> next) {
    thread_local std::vector<double> input;
    thread_local std::vector<double> probs;
    input.resize(static_cast<std::size_t>(transition_input_size(spec)));
    probs.resize(static_cast<std::size_t>(spec.state_space.onehot_width()));
    encode_transition_input(spec, state, action, input);
    forward(net, input, mask, probs);
    double p = 1.0;
    for (std::size_t f = 0; f < next.size(); ++f)
        p *= probs[static_cast<std::size_t>(spec.state_space.offset(f) + next[f])];
    return p;
}

class MaskedPairModel final : public DynamicsModel {
public:
    MaskedPairModel(ParamHandle handle, const PomdpSpec& spec, PairMask mask)
        : handle_(std::move(handle)),
          nets_(&static_cast<const BaddrParams&>(*handle_).nets()),
          spec_(&spec),
          mask_(std::move(mask)) {}

    void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                FeatureValues& observation) const override {
        sample_from_pair(*nets_, mask_, *spec_, state, action, rng, next, observation);
    }

private:
    ParamHandle handle_;
    const NetPair* nets_;
    const PomdpSpec* spec_;
    PairMask mask_;
};

}  // namespace

NetPair baddr_update(const NetPair& nets, const PomdpSpec& spec, std::span<const int> state, int action,
                     std::span<const int> next, std::span<const int> observation, const BaddrConfig& cfg,
                     RngStream& rng) {
    PairMask mask;
    if (cfg.update_with_mask) mask = sample_pair_mask(nets, rng);
    thread_local std::vector<double> t_grad;
    thread_local std::vector<double> o_grad;
    t_grad.assign(nets.transition.shape().param_count(), 0.0);
    o_grad.assign(nets.observation.shape().param_count(), 0.0);
    pair_loss_and_gradient(nets, mask, spec, state, action, next, observation, t_grad, o_grad);
    NetPair out = nets;
    const double lr = cfg.online_learning_rate;
    auto t = out.transition.params();
    for (std::size_t k = 0; k < t.size(); ++k) t[k] -= lr * t_grad[k];
    auto o = out.observation.params();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] -= lr * o_grad[k];
    return out;
}

BaddrStep baddr_step(const NetPair& nets, const PomdpSpec& spec, std::span<const int> state, int action,
                     const BaddrConfig& cfg, RngStream& rng) {
    BaddrStep out{nets, {}, {}};
    const PairMask mask = sample_pair_mask(nets, rng);
    sample_from_pair(nets, mask, spec, state, action, rng, out.next, out.observation);
    out.nets = baddr_update(nets, spec, state, action, out.next, out.observation, cfg, rng);
    return out;
}

BaddrDynamics::BaddrDynamics(std::shared_ptr<const Domain> domain, BaddrConfig config)
    : GbaDynamics(std::move(domain)), config_(config) {
    if (!(config_.online_learning_rate >= 0.0)) throw std::invalid_argument("online learning rate must be >= 0");
    if (config_.mc_samples < 1) throw std::invalid_argument("mc_samples must be positive");
}

void BaddrDynamics::sample(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                           FeatureValues& next, FeatureValues& observation) const {
    const NetPair& nets = baddr_of(params).nets();
    thread_local PairMask mask;
    sample_mask_into(nets.transition.shape(), nets.p_drop, rng, mask.transition);
    sample_mask_into(nets.observation.shape(), nets.p_drop, rng, mask.observation);
    sample_from_pair(nets, mask, spec(), state, action, rng, next, observation);
}

void BaddrDynamics::sample_next_state(const ModelParams& params, std::span<const int> state, int action,
                                      RngStream& rng, FeatureValues& next) const {
    const NetPair& nets = baddr_of(params).nets();
    thread_local DropoutMask mask;
    sample_mask_into(nets.transition.shape(), nets.p_drop, rng, mask);
    sample_transition(nets.transition, mask, spec(), state, action, rng, next);
}

double BaddrDynamics::observation_likelihood(const ModelParams& params, std::span<const int> state, int action,
                                             std::span<const int> next, std::span<const int> observation,
                                             RngStream& rng) const {
    const NetPair& nets = baddr_of(params).nets();
    thread_local DropoutMask mask;
    const int n = nets.p_drop == 0.0 ? 1 : config_.mc_samples;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        sample_mask_into(nets.observation.shape(), nets.p_drop, rng, mask);
        total += pair_observation_probability(nets, mask, spec(), state, action, next, observation);
    }
    return total / n;
}

double BaddrDynamics::likelihood(const ModelParams& params, std::span<const int> state, int action,
                                 std::span<const int> next, std::span<const int> observation, RngStream& rng) const {
    const NetPair& nets = baddr_of(params).nets();
    thread_local PairMask mask;
    const int n = nets.p_drop == 0.0 ? 1 : config_.mc_samples;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        sample_mask_into(nets.transition.shape(), nets.p_drop, rng, mask.transition);
        sample_mask_into(nets.observation.shape(), nets.p_drop, rng, mask.observation);
        total += transition_probability(nets.transition, mask.transition, spec(), state, action, next) *
                 pair_observation_probability(nets, mask.observation, spec(), state, action, next, observation);
    }
    return total / n;
}

ParamHandle BaddrDynamics::update(const ParamHandle& params, std::span<const int> state, int action,
                                  std::span<const int> next, std::span<const int> observation, RngStream& rng) const {
    const NetPair& nets = baddr_of(*params).nets();
    return std::make_shared<const BaddrParams>(baddr_update(nets, spec(), state, action, next, observation, config_, rng));
}

std::unique_ptr<DynamicsModel> BaddrDynamics::root_sample(const ParamHandle& params, RngStream& rng) const {
    const NetPair& nets = baddr_of(*params).nets();
    return std::make_unique<MaskedPairModel>(params, spec(), sample_pair_mask(nets, rng));
}

}  // namespace baddr
