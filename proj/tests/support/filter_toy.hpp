#pragma once

#include <memory>
#include <vector>

#include "baddr/belief.hpp"
#include "oracles.hpp"

namespace oracle {

/// Two known tabular models behind SimulatorDynamics, with a prior over
/// (model, s) and a fixed (action, observation) pair to condition on.
struct FilterToy {
    std::vector<std::shared_ptr<const baddr::TabularPomdp>> models;
    std::vector<baddr::ParamHandle> handles;
    std::vector<std::vector<double>> prior;
    std::shared_ptr<baddr::SimulatorDynamics> dynamics;
    int action = 0;
    int observation = 0;

    int states() const { return models.front()->tables().states; }

    double observation_probability() const {
        const int S = states();
        const int A = models.front()->tables().actions;
        const int O = models.front()->tables().observations;
        double p = 0.0;
        for (std::size_t m = 0; m < models.size(); ++m) {
            const auto& t = models[m]->tables();
            for (int s = 0; s < S; ++s)
                for (int n = 0; n < S; ++n) {
                    const auto row = static_cast<std::size_t>((s * A + action) * S + n);
                    p += prior[m][static_cast<std::size_t>(s)] * t.transition[row] *
                         t.observation[row * static_cast<std::size_t>(O) + static_cast<std::size_t>(observation)];
                }
        }
        return p;
    }

    std::vector<double> exact() const {
        std::vector<std::shared_ptr<const baddr::TabularPomdp>> m = models;
        return exact_posterior(m, prior, action, observation);
    }
};

inline FilterToy make_filter_toy(std::uint64_t seed) {
    baddr::RngStream rng(seed);
    FilterToy toy;
    for (int m = 0; m < 2; ++m) {
        auto model = std::make_shared<const baddr::TabularPomdp>(random_tables(3, 2, 2, rng, 0.05), 10, 0.95);
        toy.models.push_back(model);
        toy.handles.push_back(std::make_shared<const baddr::SimulatorParams>(model));
    }
    const auto joint = random_simplex(6, rng, 0.05);
    toy.prior = {{joint[0], joint[1], joint[2]}, {joint[3], joint[4], joint[5]}};
    toy.dynamics = std::make_shared<baddr::SimulatorDynamics>(toy.models.front());
    toy.action = 1;
    toy.observation = 0;
    if (toy.observation_probability() < 0.3) toy.observation = 1;
    return toy;
}

/// n particles drawn i.i.d. from the toy prior.
inline baddr::ParticleBelief toy_prior_belief(const FilterToy& toy, std::size_t n, baddr::RngStream& rng) {
    std::vector<double> flat;
    for (const auto& row : toy.prior) flat.insert(flat.end(), row.begin(), row.end());
    const int S = toy.states();
    std::vector<baddr::AugmentedState> particles;
    particles.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<int>(rng.categorical(flat));
        particles.push_back({baddr::FeatureValues{k % S}, toy.handles[static_cast<std::size_t>(k / S)]});
    }
    return baddr::ParticleBelief(std::move(particles));
}

/// One weighted particle per (model, s) carrying its exact prior mass.
inline baddr::ParticleBelief toy_exact_belief(const FilterToy& toy) {
    std::vector<baddr::AugmentedState> particles;
    std::vector<double> weights;
    for (std::size_t m = 0; m < toy.models.size(); ++m)
        for (int s = 0; s < toy.states(); ++s) {
            particles.push_back({baddr::FeatureValues{s}, toy.handles[m]});
            weights.push_back(toy.prior[m][static_cast<std::size_t>(s)]);
        }
    return baddr::ParticleBelief(std::move(particles), std::move(weights));
}

/// Weight mass per (model, s'), index model * S + s'.
inline std::vector<double> toy_histogram(const FilterToy& toy, const baddr::ParticleBelief& b) {
    const int S = toy.states();
    std::vector<double> h(toy.models.size() * static_cast<std::size_t>(S), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& p = b.particle(i);
        std::size_t m = 0;
        while (toy.handles[m] != p.params) ++m;
        h[m * static_cast<std::size_t>(S) + static_cast<std::size_t>(p.state[0])] += b.weight(i);
    }
    return h;
}

}  // namespace oracle
