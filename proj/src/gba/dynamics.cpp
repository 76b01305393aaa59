#include "baddr/gba.hpp"

#include <stdexcept>

namespace baddr {

GbaDynamics::GbaDynamics(std::shared_ptr<const Domain> domain) : domain_(std::move(domain)) {
    if (!domain_) throw std::invalid_argument("GBA dynamics need a domain");
}

AugmentedStep GbaDynamics::step(const AugmentedState& state, int action, RngStream& rng) const {
    AugmentedStep out;
    sample(*state.params, state.state, action, rng, out.next, out.observation);
    out.params = update(state.params, state.state, action, out.next, out.observation, rng);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

const Pomdp& model_of(const ModelParams& params) {
    const auto* p = dynamic_cast<const SimulatorParams*>(&params);
    if (!p) throw std::invalid_argument("SimulatorDynamics needs SimulatorParams");
    return p->model();
}

class SimulatorRootModel final : public DynamicsModel {
public:
    explicit SimulatorRootModel(ParamHandle handle)
        : handle_(std::move(handle)), model_(&static_cast<const SimulatorParams&>(*handle_).model()) {}

    void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                FeatureValues& observation) const override {
        model_->sample(state, action, rng, next, observation);
    }

private:
    ParamHandle handle_;
    const Pomdp* model_;
};

}  // namespace

void SimulatorDynamics::sample(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                               FeatureValues& next, FeatureValues& observation) const {
    model_of(params).sample(state, action, rng, next, observation);
}

void SimulatorDynamics::sample_next_state(const ModelParams& params, std::span<const int> state, int action,
                                          RngStream& rng, FeatureValues& next) const {
    FeatureValues observation;
    model_of(params).sample(state, action, rng, next, observation);
}

double SimulatorDynamics::observation_likelihood(const ModelParams& params, std::span<const int> state, int action,
                                                 std::span<const int> next, std::span<const int> observation,
                                                 RngStream&) const {
    return model_of(params).observation_probability(state, action, next, observation);
}

double SimulatorDynamics::likelihood(const ModelParams& params, std::span<const int> state, int action,
                                     std::span<const int> next, std::span<const int> observation, RngStream&) const {
    const Pomdp& m = model_of(params);
    return m.transition_probability(state, action, next) * m.observation_probability(state, action, next, observation);
}

ParamHandle SimulatorDynamics::update(const ParamHandle& params, std::span<const int>, int, std::span<const int>,
                                      std::span<const int>, RngStream&) const {
    return params;
}

std::unique_ptr<DynamicsModel> SimulatorDynamics::root_sample(const ParamHandle& params, RngStream&) const {
    model_of(*params);
    return std::make_unique<SimulatorRootModel>(params);
}

}  // namespace baddr
