#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "baddr/domains.hpp"

namespace baddr {

void TigerParams::validate() const {
    if (!(hear_accuracy > 0.5 && hear_accuracy <= 1.0))
        throw std::invalid_argument("tiger hear_accuracy must lie in (0.5, 1], got " + std::to_string(hear_accuracy));
}

namespace {

void check_tiger_action(int action) {
    if (action < tiger::kListen || action > tiger::kOpenRight)
        throw std::invalid_argument("invalid tiger action " + std::to_string(action));
}

}  // namespace

TigerPomdp::TigerPomdp(TigerParams params, int horizon, double discount) : params_(params) {
    params_.validate();
    spec_.discount = discount;
    spec_.horizon = horizon;
    spec_.action_count = 3;
    spec_.state_space = FeatureSpace({2});
    spec_.observation_space = FeatureSpace({3});
    spec_.reward_bounds = {std::min({params_.r_listen, params_.r_correct, params_.r_wrong}),
                           std::max({params_.r_listen, params_.r_correct, params_.r_wrong})};
    spec_.validate();
}

FeatureValues TigerPomdp::sample_initial_state(RngStream& rng) const { return tiger_reset(rng); }

double TigerPomdp::reward(std::span<const int> state, int action, std::span<const int>) const {
    check_tiger_action(action);
    if (action == tiger::kListen) return params_.r_listen;
    const int opened = action == tiger::kOpenLeft ? tiger::kLeft : tiger::kRight;
    return opened == state[0] ? params_.r_wrong : params_.r_correct;
}

bool TigerPomdp::terminal(std::span<const int>, int action, std::span<const int>) const {
    return action != tiger::kListen;
}

FeatureValues TigerPomdp::recovery_state(std::span<const int>, int, std::span<const int>, RngStream& rng) const {
    return tiger_reset(rng);
}

void TigerPomdp::sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                        FeatureValues& observation) const {
    check_tiger_action(action);
    next.assign(state.begin(), state.end());
    observation.resize(1);
    if (action == tiger::kListen) {
        const bool correct = rng.bernoulli(params_.hear_accuracy);
        const int heard = correct ? state[0] : 1 - state[0];
        observation[0] = heard == tiger::kLeft ? tiger::kHearLeft : tiger::kHearRight;
    } else {
        observation[0] = tiger::kNull;
    }
}

double TigerPomdp::transition_probability(std::span<const int> state, int action, std::span<const int> next) const {
    check_tiger_action(action);
    return next[0] == state[0] ? 1.0 : 0.0;
}

double TigerPomdp::observation_probability(std::span<const int>, int action, std::span<const int> next,
                                           std::span<const int> observation) const {
    check_tiger_action(action);
    if (action != tiger::kListen) return observation[0] == tiger::kNull ? 1.0 : 0.0;
    if (observation[0] == tiger::kNull) return 0.0;
    const int heard = observation[0] == tiger::kHearLeft ? tiger::kLeft : tiger::kRight;
    return heard == next[0] ? params_.hear_accuracy : 1.0 - params_.hear_accuracy;
}

FeatureValues tiger_reset(RngStream& rng) {
    FeatureValues s(1);
    s[0] = rng.bernoulli(0.5) ? tiger::kLeft : tiger::kRight;
    return s;
}

TransitionSample tiger_step(std::span<const int> state, int action, const TigerParams& params, RngStream& rng) {
    return TigerPomdp(params).step(state, action, rng);
}

TigerPriorSampler::TigerPriorSampler(TigerParams base, double mean, double concentration, int horizon,
                                     double discount)
    : base_(base), mean_(mean), concentration_(concentration), horizon_(horizon), discount_(discount) {
    if (!(mean > 0.5 && mean <= 1.0)) throw std::invalid_argument("tiger prior mean must lie in (0.5, 1]");
    if (!(concentration > 0.0)) throw std::invalid_argument("tiger prior concentration must be positive");
}

double TigerPriorSampler::sample_accuracy(RngStream& rng) const {
    if (std::isinf(concentration_) || mean_ == 1.0) return mean_;
    const double m = (mean_ - 0.5) / 0.5;
    const double x = rng.beta(concentration_ * m, concentration_ * (1.0 - m));
    // Keep strictly above one half.
    return std::max(0.5 + 0.5 * x, std::nextafter(0.5, 1.0));
}

std::shared_ptr<const Pomdp> TigerPriorSampler::sample(RngStream& rng) const {
    TigerParams p = base_;
    p.hear_accuracy = sample_accuracy(rng);
    return std::make_shared<TigerPomdp>(p, horizon_, discount_);
}

std::shared_ptr<const Pomdp> TigerPriorSampler::expected() const {
    TigerParams p = base_;
    p.hear_accuracy = mean_;
    return std::make_shared<TigerPomdp>(p, horizon_, discount_);
}

}  // namespace baddr
