#include <stdexcept>
#include <string>

#include "baddr/domains.hpp"

namespace baddr {

RoadRaceParams RoadRaceParams::with_lanes(int lanes, int max_distance) {
    RoadRaceParams p;
    p.lanes = lanes;
    p.max_distance = max_distance;
    p.advance_probs.resize(static_cast<std::size_t>(lanes));
    for (int i = 0; i < lanes; ++i) p.advance_probs[static_cast<std::size_t>(i)] = (i + 1.0) / (lanes + 1.0);
    return p;
}

void RoadRaceParams::validate() const {
    if (lanes < 1) throw std::invalid_argument("road race needs at least one lane");
    if (max_distance < 1) throw std::invalid_argument("road race max_distance must be at least 1");
    if (advance_probs.size() != static_cast<std::size_t>(lanes))
        throw std::invalid_argument("road race advance_probs must have one entry per lane");
    for (double p : advance_probs)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("road race advance probability outside [0, 1]");
}

namespace {

void check_road_action(int action) {
    if (action < road::kUp || action > road::kDown)
        throw std::invalid_argument("invalid road race action " + std::to_string(action));
}

int lane_delta(int action) { return action - road::kStay; }

}  // namespace

RoadRacePomdp::RoadRacePomdp(RoadRaceParams params, int horizon, double discount) : params_(std::move(params)) {
    params_.validate();
    std::vector<int> cards;
    cards.push_back(params_.lanes);
    for (int i = 0; i < params_.lanes; ++i) cards.push_back(params_.max_distance + 1);
    spec_.discount = discount;
    spec_.horizon = horizon;
    spec_.action_count = 3;
    spec_.state_space = FeatureSpace(std::move(cards));
    spec_.observation_space = FeatureSpace({params_.max_distance + 1});
    spec_.reward_bounds = {std::min(0.0, params_.penalty), static_cast<double>(params_.max_distance)};
    spec_.validate();
}

FeatureValues RoadRacePomdp::initial_state() const {
    FeatureValues s(static_cast<std::size_t>(params_.lanes) + 1);
    s[0] = params_.lanes / 2;
    for (int i = 0; i < params_.lanes; ++i) s[static_cast<std::size_t>(i) + 1] = params_.max_distance;
    return s;
}

FeatureValues RoadRacePomdp::sample_initial_state(RngStream&) const { return initial_state(); }

double RoadRacePomdp::reward(std::span<const int> state, int action, std::span<const int> next) const {
    check_road_action(action);
    const int lane = next[0];
    double r = next[static_cast<std::size_t>(lane) + 1];
    if (action != road::kStay && next[0] == state[0]) r += params_.penalty;
    return r;
}

bool RoadRacePomdp::terminal(std::span<const int>, int, std::span<const int>) const { return false; }

FeatureValues RoadRacePomdp::recovery_state(std::span<const int> state, int, std::span<const int> observation,
                                            RngStream&) const {
    FeatureValues s(state.begin(), state.end());
    s[static_cast<std::size_t>(s[0]) + 1] = observation[0];
    return s;
}

void RoadRacePomdp::sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                           FeatureValues& observation) const {
    check_road_action(action);
    const int n = params_.lanes;
    next.assign(state.begin(), state.end());
    // Cars first.
    for (int i = 0; i < n; ++i)
        if (rng.bernoulli(params_.advance_probs[static_cast<std::size_t>(i)])) next[static_cast<std::size_t>(i) + 1] -= 1;
    // Then the agent; a move fails off the road or into a car at distance 0.
    const int target = state[0] + lane_delta(action);
    if (target >= 0 && target < n && next[static_cast<std::size_t>(target) + 1] != 0) next[0] = target;
    // Overtaken cars reappear at the far end.
    for (int i = 0; i < n; ++i)
        if (next[static_cast<std::size_t>(i) + 1] < 0) next[static_cast<std::size_t>(i) + 1] = params_.max_distance;
    observation.resize(1);
    observation[0] = next[static_cast<std::size_t>(next[0]) + 1];
}

double RoadRacePomdp::transition_probability(std::span<const int> state, int action, std::span<const int> next) const {
    check_road_action(action);
    const int n = params_.lanes;
    const int l = params_.max_distance;
    double prob = 1.0;
    // Recover each car's pre-reset position; the map is injective.
    std::vector<int> moved(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i) + 1;
        const double q = params_.advance_probs[static_cast<std::size_t>(i)];
        if (next[k] == state[k]) {
            moved[k - 1] = state[k];
            prob *= 1.0 - q;
        } else if (next[k] == state[k] - 1 || (state[k] == 0 && next[k] == l)) {
            moved[k - 1] = state[k] - 1;
            prob *= q;
        } else {
            return 0.0;
        }
    }
    const int target = state[0] + lane_delta(action);
    const bool moves = target >= 0 && target < n && moved[static_cast<std::size_t>(target)] != 0;
    const int lane = moves ? target : state[0];
    return next[0] == lane ? prob : 0.0;
}

double RoadRacePomdp::observation_probability(std::span<const int>, int, std::span<const int> next,
                                              std::span<const int> observation) const {
    return observation[0] == next[static_cast<std::size_t>(next[0]) + 1] ? 1.0 : 0.0;
}

FeatureValues roadrace_reset(const RoadRaceParams& params, RngStream& rng) {
    return RoadRacePomdp(params).sample_initial_state(rng);
}

TransitionSample roadrace_step(std::span<const int> state, int action, const RoadRaceParams& params, RngStream& rng) {
    return RoadRacePomdp(params).step(state, action, rng);
}

RoadRacePriorSampler::RoadRacePriorSampler(RoadRaceParams base, int horizon, double discount)
    : base_(std::move(base)), horizon_(horizon), discount_(discount) {
    base_.validate();
}

std::shared_ptr<const Pomdp> RoadRacePriorSampler::sample(RngStream& rng) const {
    RoadRaceParams p = base_;
    for (double& q : p.advance_probs) q = rng.uniform();
    return std::make_shared<RoadRacePomdp>(p, horizon_, discount_);
}

std::shared_ptr<const Pomdp> RoadRacePriorSampler::expected() const {
    RoadRaceParams p = base_;
    for (double& q : p.advance_probs) q = 0.5;
    return std::make_shared<RoadRacePomdp>(p, horizon_, discount_);
}

}  // namespace baddr
