#include <doctest.h>

#include <cmath>

#include "baddr/belief.hpp"
#include "filter_toy.hpp"

using namespace baddr;

namespace {

std::shared_ptr<const TigerPomdp> tiger_with(double accuracy) {
    TigerParams p;
    p.hear_accuracy = accuracy;
    return std::make_shared<const TigerPomdp>(p);
}

bool same_belief(const ParticleBelief& a, const ParticleBelief& b) {
    if (a.size() != b.size() || a.weights() != b.weights()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.particle(i).params != b.particle(i).params || a.particle(i).state != b.particle(i).state) return false;
    return true;
}

}  // namespace

TEST_CASE("ParticleBelief invariants") {
    auto tiger = tiger_with(0.85);
    const ParamHandle h = std::make_shared<const SimulatorParams>(tiger);
    std::vector<AugmentedState> ps{{FeatureValues{0}, h}, {FeatureValues{1}, h}};
    const ParticleBelief u(ps);
    CHECK(u.mode() == BeliefMode::unweighted);
    CHECK(u.weight(0) == u.weight(1));
    CHECK_NOTHROW(u.validate());
    const ParticleBelief w(ps, std::vector<double>{3.0, 1.0});
    CHECK(w.weight(0) == doctest::Approx(0.75));
    CHECK_NOTHROW(w.validate());
    CHECK_THROWS(ParticleBelief(ps, std::vector<double>{0.0, 0.0}));
    CHECK_THROWS(ParticleBelief(std::vector<AugmentedState>{}));
}

TEST_CASE("systematic_resample") {
    RngStream rng(1);
    const std::vector<double> one{0.0, 1.0, 0.0};
    for (auto i : systematic_resample(one, 7, rng)) CHECK(i == 1);
    const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    for (int trial = 0; trial < 50; ++trial) {
        const auto idx = systematic_resample(w, 100, rng);
        REQUIRE(idx.size() == 100);
        std::vector<int> counts(4, 0);
        for (auto i : idx) counts[i]++;
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(counts[k] >= static_cast<int>(std::floor(100 * w[k])) - 1);
            CHECK(counts[k] <= static_cast<int>(std::ceil(100 * w[k])) + 1);
        }
    }
}

TEST_CASE("rejection_update examples") {
    auto tiger = tiger_with(0.85);
    SimulatorDynamics dyn(tiger);
    const ParamHandle h = std::make_shared<const SimulatorParams>(tiger);
    RngStream rng(2);
    const ParticleBelief b(std::vector<AugmentedState>(10, AugmentedState{FeatureValues{0}, h}));

    const FeatureValues null_obs{tiger::kNull};
    const auto opened = rejection_update(b, tiger::kOpenLeft, null_obs, 50, dyn, 50, rng);
    CHECK(opened.size() == 50);
    CHECK(opened.mode() == BeliefMode::unweighted);

    try {
        (void)rejection_update(b, tiger::kListen, null_obs, 5, dyn, 1000, rng);
        FAIL("expected a belief update failure");
    } catch (const BeliefUpdateFailure& e) {
        CHECK(e.accepted() == 0);
    }
}

TEST_CASE("rejection_update matches the exact posterior") {
    const auto toy = oracle::make_filter_toy(3);
    RngStream rng(4);
    const FeatureValues o{toy.observation};
    const auto post = rejection_update(oracle::toy_exact_belief(toy), toy.action, o, 100000, *toy.dynamics,
                                       100000000, rng);
    CHECK_NOTHROW(post.validate());
    CHECK(oracle::tv_distance(oracle::toy_histogram(toy, post), toy.exact()) < 0.02);
}

TEST_CASE("rejection acceptance rate equals the observation probability") {
    const auto toy = oracle::make_filter_toy(5);
    RngStream rng(6);
    const FeatureValues o{toy.observation};
    try {
        (void)rejection_update(oracle::toy_exact_belief(toy), toy.action, o, 1000000, *toy.dynamics, 100000, rng);
        FAIL("expected the attempt budget to run out");
    } catch (const BeliefUpdateFailure& e) {
        CHECK(std::abs(static_cast<double>(e.accepted()) / 1e5 - toy.observation_probability()) < 0.01);
    }
}

TEST_CASE("importance_update matches the exact posterior") {
    const auto toy = oracle::make_filter_toy(7);
    RngStream rng(8);
    const FeatureValues o{toy.observation};
    const auto prior = oracle::toy_prior_belief(toy, 100000, rng);
    const auto post = importance_update(prior, toy.action, o, 100000, *toy.dynamics, rng);
    CHECK(post.mode() == BeliefMode::weighted);
    CHECK(post.size() == 100000);
    CHECK_NOTHROW(post.validate());
    CHECK(oracle::tv_distance(oracle::toy_histogram(toy, post), toy.exact()) < 0.02);
}

TEST_CASE("importance_update examples") {
    auto tiger = tiger_with(0.85);
    SimulatorDynamics dyn(tiger);
    const ParamHandle h = std::make_shared<const SimulatorParams>(tiger);
    RngStream rng(9);
    std::vector<AugmentedState> ps;
    for (int i = 0; i < 20; ++i) ps.push_back({FeatureValues{i % 2}, h});
    const ParticleBelief b(ps);
    const FeatureValues null_obs{tiger::kNull};
    const auto post = importance_update(b, tiger::kOpenRight, null_obs, 8, dyn, rng);
    CHECK(post.size() == 8);
    for (double w : post.weights()) CHECK(w == doctest::Approx(1.0 / 8));
    CHECK_THROWS_AS(importance_update(b, tiger::kListen, null_obs, 8, dyn, rng), BeliefUpdateFailure);
}

TEST_CASE("filtering_update reweights by repeated Bayes factors") {
    auto model = tiger_with(0.9);
    SimulatorDynamics dyn(model);
    const ParamHandle ha = std::make_shared<const SimulatorParams>(model);
    const ParamHandle hb = std::make_shared<const SimulatorParams>(model);
    ParticleBelief belief(std::vector<AugmentedState>{{FeatureValues{0}, ha}, {FeatureValues{1}, hb}},
                          BeliefMode::weighted);
    RngStream rng(10);
    const FeatureValues hear_left{tiger::kHearLeft};
    for (int k = 1; k <= 4; ++k) {
        belief = filtering_update(belief, tiger::kListen, hear_left, dyn, rng);
        const double ratio = std::pow(9.0, k);
        CHECK(belief.weight(0) == doctest::Approx(ratio / (ratio + 1.0)).epsilon(1e-12));
        CHECK(belief.particle(0).params == ha);
        CHECK(belief.particle(1).params == hb);
    }
    const FeatureValues null_obs{tiger::kNull};
    const auto opened = filtering_update(belief, tiger::kOpenLeft, null_obs, dyn, rng);
    CHECK(opened.weight(0) == doctest::Approx(belief.weight(0)).epsilon(1e-12));
    CHECK_THROWS(filtering_update(ParticleBelief(belief.particles()), tiger::kListen, hear_left, dyn, rng));
}

TEST_CASE("filtering over eight tiger models identifies the true one") {
    const std::vector<double> accuracies{0.52, 0.56, 0.6, 0.64, 0.68, 0.72, 0.85, 0.98};
    std::vector<ParamHandle> handles;
    for (double q : accuracies) handles.push_back(std::make_shared<const SimulatorParams>(tiger_with(q)));
    const auto truth = tiger_with(0.85);
    SimulatorDynamics dyn(truth);
    RngStream rng(11);
    int identified = 0;
    double worst = 0.0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<AugmentedState> ps;
        for (const auto& h : handles)
            for (int s = 0; s < 2; ++s) ps.push_back({FeatureValues{s}, h});
        ParticleBelief belief(ps, BeliefMode::weighted);
        const int door = static_cast<int>(rng.uniform_index(2));
        std::vector<double> log_lik(2 * accuracies.size(), 0.0);
        for (int t = 0; t < 200; ++t) {
            const bool correct = rng.bernoulli(0.85);
            const int heard = correct ? door : 1 - door;
            belief = filtering_update(belief, tiger::kListen, FeatureValues{heard}, dyn, rng);
            for (std::size_t m = 0; m < accuracies.size(); ++m)
                for (int s = 0; s < 2; ++s)
                    log_lik[2 * m + static_cast<std::size_t>(s)] +=
                        std::log(heard == s ? accuracies[m] : 1.0 - accuracies[m]);
        }
        const double top = *std::max_element(log_lik.begin(), log_lik.end());
        double z = 0.0;
        for (double l : log_lik) z += std::exp(l - top);
        for (std::size_t i = 0; i < log_lik.size(); ++i)
            worst = std::max(worst, std::abs(belief.weight(i) - std::exp(log_lik[i] - top) / z));
        if (belief.weight(12) + belief.weight(13) >= 0.9) ++identified;
    }
    CHECK(worst < 1e-9);
    CHECK(identified >= 90);
}

TEST_CASE("updates are reproducible") {
    const auto toy = oracle::make_filter_toy(12);
    const FeatureValues o{toy.observation};
    RngStream seed_rng(13);
    const auto prior = oracle::toy_prior_belief(toy, 500, seed_rng);
    RngStream r1(14);
    RngStream r2(14);
    CHECK(same_belief(rejection_update(prior, toy.action, o, 300, *toy.dynamics, 100000, r1),
                      rejection_update(prior, toy.action, o, 300, *toy.dynamics, 100000, r2)));
    CHECK(same_belief(importance_update(prior, toy.action, o, 300, *toy.dynamics, r1),
                      importance_update(prior, toy.action, o, 300, *toy.dynamics, r2)));
}

TEST_CASE("belief probes") {
    auto tiger = tiger_with(0.7);
    SimulatorDynamics dyn(tiger);
    const ParamHandle h = std::make_shared<const SimulatorParams>(tiger);
    const ParticleBelief b(std::vector<AugmentedState>{{FeatureValues{0}, h}, {FeatureValues{1}, h}});
    const auto constant = belief_probe(b, [](const AugmentedState&) { return 0.85; });
    CHECK(constant.mean == doctest::Approx(0.85));
    CHECK(constant.histogram[17] == doctest::Approx(1.0));

    const auto split = belief_probe(b, [](const AugmentedState& p) { return p.state[0] == 0 ? 0.6 : 1.0; });
    CHECK(split.mean == doctest::Approx(0.8));
    CHECK(split.histogram[12] == doctest::Approx(0.5));
    CHECK(split.histogram[19] == doctest::Approx(0.5));

    RngStream rng(15);
    CHECK(tiger_hear_probe(b, dyn, rng).mean == doctest::Approx(0.7));
}
