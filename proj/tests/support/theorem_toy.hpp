#pragma once

// Two-state toy with a two-point prior over dynamics, evaluated exactly both
// as a Bayesian RL problem over (model, state) beliefs and as a GBA-POMDP
// whose θ is the posterior weight vector over the two candidate models.

#include <cmath>
#include <memory>
#include <vector>

#include "baddr/gba.hpp"
#include "oracles.hpp"

namespace oracle {

struct TheoremToy {
    std::vector<std::shared_ptr<const baddr::TabularPomdp>> models;
    std::vector<double> prior;
    double discount = 0.9;

    int states() const { return models.front()->tables().states; }
    int actions() const { return models.front()->tables().actions; }
    int observations() const { return models.front()->tables().observations; }
    double T(std::size_t m, int s, int a, int n) const {
        const auto& t = models[m]->tables();
        return t.transition[static_cast<std::size_t>((s * t.actions + a) * t.states + n)];
    }
    double O(std::size_t m, int s, int a, int n, int o) const {
        const auto& t = models[m]->tables();
        return t.observation[static_cast<std::size_t>(((s * t.actions + a) * t.states + n) * t.observations + o)];
    }
    double R(int s, int a, int n) const {
        const auto& t = models.front()->tables();
        return t.reward[static_cast<std::size_t>((s * t.actions + a) * t.states + n)];
    }
    double initial(int s) const { return models.front()->tables().initial[static_cast<std::size_t>(s)]; }
};

/// Two random models sharing rewards and initial distribution.
inline TheoremToy make_theorem_toy(std::uint64_t seed) {
    RngStream rng(seed);
    TheoremToy toy;
    auto a = random_tables(2, 2, 2, rng, 0.1);
    auto b = random_tables(2, 2, 2, rng, 0.1);
    b.reward = a.reward;
    b.initial = a.initial;
    toy.models.push_back(std::make_shared<const baddr::TabularPomdp>(a, 2, toy.discount));
    toy.models.push_back(std::make_shared<const baddr::TabularPomdp>(b, 2, toy.discount));
    toy.prior = {0.35, 0.65};
    return toy;
}

// ---- direct side: belief over (model, state) -------------------------------

using JointBelief = std::vector<double>;  // index m * S + s

inline double direct_value(const TheoremToy& toy, const JointBelief& b, int steps_left);

inline double direct_q(const TheoremToy& toy, const JointBelief& b, int a, int steps_left) {
    const int S = toy.states();
    double q = 0.0;
    for (std::size_t m = 0; m < toy.models.size(); ++m)
        for (int s = 0; s < S; ++s)
            for (int n = 0; n < S; ++n)
                q += b[m * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)] * toy.T(m, s, a, n) * toy.R(s, a, n);
    if (steps_left <= 1) return q;
    for (int o = 0; o < toy.observations(); ++o) {
        JointBelief next(b.size(), 0.0);
        double p_o = 0.0;
        for (std::size_t m = 0; m < toy.models.size(); ++m)
            for (int s = 0; s < S; ++s)
                for (int n = 0; n < S; ++n) {
                    const double p = b[m * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)] *
                                     toy.T(m, s, a, n) * toy.O(m, s, a, n, o);
                    next[m * static_cast<std::size_t>(S) + static_cast<std::size_t>(n)] += p;
                    p_o += p;
                }
        if (p_o == 0.0) continue;
        for (double& x : next) x /= p_o;
        q += toy.discount * p_o * direct_value(toy, next, steps_left - 1);
    }
    return q;
}

inline double direct_value(const TheoremToy& toy, const JointBelief& b, int steps_left) {
    if (steps_left <= 0) return 0.0;
    double best = -1e300;
    for (int a = 0; a < toy.actions(); ++a) best = std::max(best, direct_q(toy, b, a, steps_left));
    return best;
}

inline JointBelief direct_initial(const TheoremToy& toy) {
    JointBelief b;
    for (std::size_t m = 0; m < toy.models.size(); ++m)
        for (int s = 0; s < toy.states(); ++s) b.push_back(toy.prior[m] * toy.initial(s));
    return b;
}

inline JointBelief direct_update(const TheoremToy& toy, const JointBelief& b, int a, int o) {
    const int S = toy.states();
    JointBelief next(b.size(), 0.0);
    double total = 0.0;
    for (std::size_t m = 0; m < toy.models.size(); ++m)
        for (int s = 0; s < S; ++s)
            for (int n = 0; n < S; ++n) {
                const double p = b[m * static_cast<std::size_t>(S) + static_cast<std::size_t>(s)] * toy.T(m, s, a, n) *
                                 toy.O(m, s, a, n, o);
                next[m * static_cast<std::size_t>(S) + static_cast<std::size_t>(n)] += p;
                total += p;
            }
    for (double& x : next) x /= total;
    return next;
}

// ---- GBA side: θ = posterior weights over the support ---------------------

class SupportWeights final : public baddr::ModelParams {
public:
    explicit SupportWeights(std::vector<double> w) : weights(std::move(w)) {}
    std::vector<double> weights;
};

/// p(s', o | θ, s, a) = Σ_m θ_m p_m(s', o | s, a); U reweights θ by p_m.
class SupportDynamics final : public baddr::GbaDynamics {
public:
    SupportDynamics(const TheoremToy& toy) : GbaDynamics(toy.models.front()), toy_(toy) {}

    void sample(const baddr::ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                baddr::FeatureValues& next, baddr::FeatureValues& observation) const override {
        const auto& w = static_cast<const SupportWeights&>(params).weights;
        std::vector<double> joint;
        for (int n = 0; n < toy_.states(); ++n)
            for (int o = 0; o < toy_.observations(); ++o) joint.push_back(mix(w, state[0], action, n, o));
        const auto k = static_cast<int>(rng.categorical(joint));
        next = {k / toy_.observations()};
        observation = {k % toy_.observations()};
    }
    void sample_next_state(const baddr::ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                           baddr::FeatureValues& next) const override {
        baddr::FeatureValues o;
        sample(params, state, action, rng, next, o);
    }
    double observation_likelihood(const baddr::ModelParams& params, std::span<const int> state, int action,
                                  std::span<const int> next, std::span<const int> observation,
                                  RngStream& rng) const override {
        double pn = 0.0;
        for (int o = 0; o < toy_.observations(); ++o) pn += mix(static_cast<const SupportWeights&>(params).weights, state[0], action, next[0], o);
        return likelihood(params, state, action, next, observation, rng) / pn;
    }
    double likelihood(const baddr::ModelParams& params, std::span<const int> state, int action,
                      std::span<const int> next, std::span<const int> observation, RngStream&) const override {
        return mix(static_cast<const SupportWeights&>(params).weights, state[0], action, next[0], observation[0]);
    }
    baddr::ParamHandle update(const baddr::ParamHandle& params, std::span<const int> state, int action,
                              std::span<const int> next, std::span<const int> observation, RngStream&) const override {
        std::vector<double> w = static_cast<const SupportWeights&>(*params).weights;
        double total = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m) {
            w[m] *= toy_.T(m, state[0], action, next[0]) * toy_.O(m, state[0], action, next[0], observation[0]);
            total += w[m];
        }
        for (double& x : w) x /= total;
        return std::make_shared<const SupportWeights>(std::move(w));
    }
    std::unique_ptr<baddr::DynamicsModel> root_sample(const baddr::ParamHandle&, RngStream&) const override {
        return nullptr;
    }

private:
    double mix(const std::vector<double>& w, int s, int a, int n, int o) const {
        double p = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m) p += w[m] * toy_.T(m, s, a, n) * toy_.O(m, s, a, n, o);
        return p;
    }
    const TheoremToy& toy_;
};

/// Exact belief over augmented states, kept as a list of weighted entries.
struct AugmentedEntry {
    int state;
    baddr::ParamHandle params;
    double probability;
};
using AugmentedBelief = std::vector<AugmentedEntry>;

inline AugmentedBelief gba_initial(const TheoremToy& toy) {
    auto theta = std::make_shared<const SupportWeights>(toy.prior);
    AugmentedBelief b;
    for (int s = 0; s < toy.states(); ++s) b.push_back({s, theta, toy.initial(s)});
    return b;
}

/// Bayes update of the augmented belief through the dynamics interface.
inline AugmentedBelief gba_update(const TheoremToy& toy, const baddr::GbaDynamics& dyn, const AugmentedBelief& b, int a,
                                  int o, double* p_obs = nullptr) {
    RngStream unused(0);
    AugmentedBelief next;
    double total = 0.0;
    for (const auto& e : b)
        for (int n = 0; n < toy.states(); ++n) {
            const int s_arr[] = {e.state};
            const int n_arr[] = {n};
            const int o_arr[] = {o};
            const double p = e.probability * dyn.likelihood(*e.params, s_arr, a, n_arr, o_arr, unused);
            if (p == 0.0) continue;
            next.push_back({n, dyn.update(e.params, s_arr, a, n_arr, o_arr, unused), p});
            total += p;
        }
    if (p_obs) *p_obs = total;
    for (auto& e : next) e.probability /= total;
    return next;
}

inline double gba_value(const TheoremToy& toy, const baddr::GbaDynamics& dyn, const AugmentedBelief& b, int steps_left);

inline double gba_q(const TheoremToy& toy, const baddr::GbaDynamics& dyn, const AugmentedBelief& b, int a,
                    int steps_left) {
    RngStream unused(0);
    double q = 0.0;
    for (const auto& e : b)
        for (int n = 0; n < toy.states(); ++n)
            for (int o = 0; o < toy.observations(); ++o) {
                const int s_arr[] = {e.state};
                const int n_arr[] = {n};
                const int o_arr[] = {o};
                q += e.probability * dyn.likelihood(*e.params, s_arr, a, n_arr, o_arr, unused) * toy.R(e.state, a, n);
            }
    if (steps_left <= 1) return q;
    for (int o = 0; o < toy.observations(); ++o) {
        double p_o = 0.0;
        const AugmentedBelief next = gba_update(toy, dyn, b, a, o, &p_o);
        if (p_o == 0.0) continue;
        q += toy.discount * p_o * gba_value(toy, dyn, next, steps_left - 1);
    }
    return q;
}

inline double gba_value(const TheoremToy& toy, const baddr::GbaDynamics& dyn, const AugmentedBelief& b, int steps_left) {
    if (steps_left <= 0) return 0.0;
    double best = -1e300;
    for (int a = 0; a < toy.actions(); ++a) best = std::max(best, gba_q(toy, dyn, b, a, steps_left));
    return best;
}

/// Largest |V_direct(h) - V_gba(h)| over the root and every depth-1 history.
inline double theorem_gap(const TheoremToy& toy, int horizon) {
    SupportDynamics dyn(toy);
    const JointBelief d0 = direct_initial(toy);
    const AugmentedBelief g0 = gba_initial(toy);
    double gap = std::abs(direct_value(toy, d0, horizon) - gba_value(toy, dyn, g0, horizon));
    for (int a = 0; a < toy.actions(); ++a) {
        gap = std::max(gap, std::abs(direct_q(toy, d0, a, horizon) - gba_q(toy, dyn, g0, a, horizon)));
        for (int o = 0; o < toy.observations(); ++o) {
            const JointBelief d1 = direct_update(toy, d0, a, o);
            const AugmentedBelief g1 = gba_update(toy, dyn, g0, a, o);
            for (int a2 = 0; a2 < toy.actions(); ++a2)
                gap = std::max(gap, std::abs(direct_q(toy, d1, a2, horizon - 1) - gba_q(toy, dyn, g1, a2, horizon - 1)));
        }
    }
    return gap;
}

}  // namespace oracle
