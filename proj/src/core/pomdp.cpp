#include "baddr/pomdp.hpp"

#include <chrono>
#include <string>

namespace baddr {

void PomdpSpec::validate() const {
    if (!(discount >= 0.0 && discount <= 1.0)) throw std::invalid_argument("discount must lie in [0, 1]");
    if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
    if (action_count < 1) throw std::invalid_argument("action_count must be at least 1");
    if (state_space.feature_count() == 0) throw std::invalid_argument("state space has no features");
    if (observation_space.feature_count() == 0) throw std::invalid_argument("observation space has no features");
    if (reward_bounds.first > reward_bounds.second) throw std::invalid_argument("reward bounds are inverted");
}

FeatureValues Domain::recovery_state(std::span<const int> state, int, std::span<const int>, RngStream&) const {
    return FeatureValues(state.begin(), state.end());
}

TransitionSample Pomdp::step(std::span<const int> state, int action, RngStream& rng) const {
    TransitionSample out;
    sample(state, action, rng, out.next_state, out.observation);
    out.reward = reward(state, action, out.next_state);
    out.terminal = terminal(state, action, out.next_state);
    return out;
}

double discounted_return(std::span<const double> rewards, double discount) {
    double total = 0.0;
    double scale = 1.0;
    for (double r : rewards) {
        total += scale * r;
        scale *= discount;
    }
    return total;
}

SimulatedEnvironment::SimulatedEnvironment(std::shared_ptr<const Pomdp> model) : model_(std::move(model)) {}

void SimulatedEnvironment::reset(RngStream& rng) { state_ = model_->sample_initial_state(rng); }

TransitionSample SimulatedEnvironment::step(int action, RngStream& rng) {
    TransitionSample out = model_->step(state_, action, rng);
    state_ = out.next_state;
    return out;
}

EpisodeResult run_episode(Environment& env, Agent& agent, const PomdpSpec& spec, RngStream& rng) {
    const auto start = std::chrono::steady_clock::now();
    EpisodeResult result;
    env.reset(rng);
    agent.begin_episode(rng);
    for (int t = 0; t < spec.horizon; ++t) {
        const int action = agent.act(spec.horizon - t, rng);
        if (action < 0 || action >= spec.action_count)
            throw ContractViolation("agent emitted action " + std::to_string(action) + " outside [0, " +
                                    std::to_string(spec.action_count) + ")");
        const TransitionSample sample = env.step(action, rng);
        result.reward_trace.push_back(sample.reward);
        agent.observe(action, sample.observation, rng);
        if (sample.terminal) break;
    }
    result.steps = static_cast<int>(result.reward_trace.size());
    result.discounted_return = discounted_return(result.reward_trace, spec.discount);
    result.wall_millis = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                             .count();
    return result;
}

}  // namespace baddr
