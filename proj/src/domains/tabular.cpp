#include <cmath>
#include <stdexcept>

#include "baddr/domains.hpp"

namespace baddr {

namespace {

void check_distribution(std::span<const double> probs, const char* what) {
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument(std::string(what) + " has a negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument(std::string(what) + " rows must sum to 1");
}

}  // namespace

TabularPomdp::TabularPomdp(TabularTables tables, int horizon, double discount) : tables_(std::move(tables)) {
    const auto S = static_cast<std::size_t>(tables_.states);
    const auto A = static_cast<std::size_t>(tables_.actions);
    const auto O = static_cast<std::size_t>(tables_.observations);
    if (tables_.transition.size() != S * A * S || tables_.observation.size() != S * A * S * O ||
        tables_.reward.size() != S * A * S || tables_.initial.size() != S ||
        (!tables_.terminal.empty() && tables_.terminal.size() != S * A * S))
        throw std::invalid_argument("tabular POMDP tables have inconsistent sizes");
    for (std::size_t row = 0; row < S * A; ++row)
        check_distribution(std::span<const double>(tables_.transition).subspan(row * S, S), "transition");
    for (std::size_t row = 0; row < S * A * S; ++row)
        check_distribution(std::span<const double>(tables_.observation).subspan(row * O, O), "observation");
    check_distribution(tables_.initial, "initial");

    spec_.discount = discount;
    spec_.horizon = horizon;
    spec_.action_count = tables_.actions;
    spec_.state_space = FeatureSpace({tables_.states});
    spec_.observation_space = FeatureSpace({tables_.observations});
    double lo = tables_.reward.front();
    double hi = lo;
    for (double r : tables_.reward) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    spec_.reward_bounds = {lo, hi};
    spec_.validate();
}

FeatureValues TabularPomdp::sample_initial_state(RngStream& rng) const {
    FeatureValues s(1);
    s[0] = static_cast<int>(rng.categorical(tables_.initial));
    return s;
}

double TabularPomdp::reward(std::span<const int> state, int action, std::span<const int> next) const {
    const auto S = static_cast<std::size_t>(tables_.states);
    const auto A = static_cast<std::size_t>(tables_.actions);
    return tables_.reward[(static_cast<std::size_t>(state[0]) * A + static_cast<std::size_t>(action)) * S +
                          static_cast<std::size_t>(next[0])];
}

bool TabularPomdp::terminal(std::span<const int> state, int action, std::span<const int> next) const {
    if (tables_.terminal.empty()) return false;
    const auto S = static_cast<std::size_t>(tables_.states);
    const auto A = static_cast<std::size_t>(tables_.actions);
    return tables_.terminal[(static_cast<std::size_t>(state[0]) * A + static_cast<std::size_t>(action)) * S +
                            static_cast<std::size_t>(next[0])] != 0;
}

void TabularPomdp::sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                          FeatureValues& observation) const {
    if (action < 0 || action >= tables_.actions) throw std::invalid_argument("invalid tabular action");
    const auto S = static_cast<std::size_t>(tables_.states);
    const auto A = static_cast<std::size_t>(tables_.actions);
    const auto O = static_cast<std::size_t>(tables_.observations);
    const std::size_t row = static_cast<std::size_t>(state[0]) * A + static_cast<std::size_t>(action);
    const auto s_next = rng.categorical(std::span<const double>(tables_.transition).subspan(row * S, S));
    const auto o = rng.categorical(std::span<const double>(tables_.observation).subspan((row * S + s_next) * O, O));
    next.resize(1);
    observation.resize(1);
    next[0] = static_cast<int>(s_next);
    observation[0] = static_cast<int>(o);
}

double TabularPomdp::transition_probability(std::span<const int> state, int action, std::span<const int> next) const {
    const auto S = static_cast<std::size_t>(tables_.states);
    const auto A = static_cast<std::size_t>(tables_.actions);
    return tables_.transition[(static_cast<std::size_t>(state[0]) * A + static_cast<std::size_t>(action)) * S +
                              static_cast<std::size_t>(next[0])];
}

double TabularPomdp::observation_probability(std::span<const int> state, int action, std::span<const int> next,
                                             std::span<const int> observation) const {
    const auto S = static_cast<std::size_t>(tables_.states);
    const auto A = static_cast<std::size_t>(tables_.actions);
    const auto O = static_cast<std::size_t>(tables_.observations);
    const std::size_t row = static_cast<std::size_t>(state[0]) * A + static_cast<std::size_t>(action);
    return tables_.observation[(row * S + static_cast<std::size_t>(next[0])) * O +
                               static_cast<std::size_t>(observation[0])];
}

}  // namespace baddr
