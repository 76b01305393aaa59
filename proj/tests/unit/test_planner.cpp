#include <doctest.h>

#include <cmath>

#include "baddr/planner.hpp"
#include "oracles.hpp"

using namespace baddr;

namespace {

// One state, one observation, reward per action; optionally terminal after one step.
std::shared_ptr<const TabularPomdp> bandit(const std::vector<double>& rewards, double discount, bool terminal) {
    TabularTables t;
    t.states = 1;
    t.actions = static_cast<int>(rewards.size());
    t.observations = 1;
    t.transition.assign(rewards.size(), 1.0);
    t.observation.assign(rewards.size(), 1.0);
    t.reward = rewards;
    t.initial = {1.0};
    if (terminal) t.terminal.assign(rewards.size(), 1);
    return std::make_shared<const TabularPomdp>(t, 30, discount);
}

ParticleBelief point_belief(const std::shared_ptr<const Pomdp>& model, FeatureValues state) {
    const ParamHandle h = std::make_shared<const SimulatorParams>(model);
    return ParticleBelief(std::vector<AugmentedState>{{std::move(state), h}});
}

PlannerConfig config(int simulations, double u, int depth, double discount) {
    PlannerConfig cfg;
    cfg.num_simulations = simulations;
    cfg.ucb_constant = u;
    cfg.max_depth = depth;
    cfg.discount = discount;
    return cfg;
}

}  // namespace

TEST_CASE("ucb_select examples") {
    RngStream rng(1);
    TreeNode node(2);
    node.visits = {3, 0};
    node.values = {5.0, 0.0};
    node.total = 3;
    CHECK(ucb_select(node, 100.0, rng) == 1);

    node.visits = {10, 10};
    node.values = {1.0, 0.0};
    node.total = 20;
    CHECK(ucb_select(node, 0.0, rng) == 0);

    node.visits = {100, 1};
    node.values = {1.0, 1.0};
    node.total = 101;
    CHECK(ucb_select(node, 100.0, rng) == 1);

    node.visits = {4, 4};
    node.values = {2.0, 2.0};
    node.total = 8;
    int first = 0;
    for (int i = 0; i < 2000; ++i) first += ucb_select(node, 1.0, rng) == 0;
    CHECK(first > 900);
    CHECK(first < 1100);

    TreeNode fresh(3);
    std::vector<int> picks(3, 0);
    for (int i = 0; i < 3000; ++i) picks[static_cast<std::size_t>(ucb_select(fresh, 1.0, rng))]++;
    for (int p : picks) CHECK(p > 850);
}

TEST_CASE("simulate returns zero at max depth") {
    const auto model = bandit({1.0}, 0.5, false);
    TreeNode root(1);
    RngStream rng(2);
    const auto cfg = config(1, 1.0, 3, 0.5);
    const FeatureValues s{0};
    CHECK(simulate(*model, *model, s, 3, root, cfg, rng) == 0.0);
    CHECK(root.total == 0);
    CHECK(rollout(*model, *model, s, 3, cfg, rng) == 0.0);
}

TEST_CASE("one-action chain converges to the discounted sum") {
    const auto model = bandit({1.0}, 0.5, false);
    TreeNode root(1);
    RngStream rng(3);
    const auto cfg = config(1, 1.0, 3, 0.5);
    const FeatureValues s{0};
    simulate(*model, *model, s, 0, root, cfg, rng);
    CHECK(root.visits[0] == 1);
    simulate(*model, *model, s, 0, root, cfg, rng);
    CHECK(root.visits[0] == 2);
    for (int k = 0; k < 1000; ++k) simulate(*model, *model, s, 0, root, cfg, rng);
    CHECK(root.values[0] == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(root.total == 1002);
}

TEST_CASE("rollout closed forms") {
    RngStream rng(4);
    const auto chain = bandit({2.0}, 0.9, false);
    const FeatureValues s{0};
    const auto cfg = config(1, 1.0, 5, 0.9);
    const double expected = 2.0 * (1.0 - std::pow(0.9, 4)) / (1.0 - 0.9);
    CHECK(rollout(*chain, *chain, s, 1, cfg, rng) == doctest::Approx(expected));

    const auto arms = bandit({0.0, 1.0}, 0.9, false);
    double total = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) total += rollout(*arms, *arms, s, 0, cfg, rng);
    const double analytic = 0.5 * (1.0 - std::pow(0.9, 5)) / (1.0 - 0.9);
    CHECK(std::abs(total / n - analytic) < 0.05);
}

TEST_CASE("plan picks the rewarding action on a one-step toy") {
    const auto model = bandit({1.0, -1.0}, 0.95, true);
    SimulatorDynamics dyn(model);
    const auto belief = point_belief(model, FeatureValues{0});
    const auto cfg = config(32, 1.0, 1, 0.95);
    RngStream rng(5);
    int correct = 0;
    for (int trial = 0; trial < 1000; ++trial) correct += plan(belief, dyn, cfg, rng).action == 0;
    CHECK(correct >= 990);
}

TEST_CASE("plan statistics") {
    RngStream setup(6);
    const auto model = std::make_shared<const TabularPomdp>(oracle::random_tables(3, 3, 2, setup), 10, 0.95);
    SimulatorDynamics dyn(model);
    const auto belief = point_belief(model, FeatureValues{1});
    RngStream rng(7);

    const auto once = plan(belief, dyn, config(3, 10.0, 5, 0.95), rng);
    for (auto v : once.visits) CHECK(v == 1);

    for (int sims : {1, 17, 200}) {
        const auto r = plan(belief, dyn, config(sims, 10.0, 5, 0.95), rng);
        std::int64_t total = 0;
        for (auto v : r.visits) total += v;
        CHECK(total == sims);
    }

    RngStream a(8);
    RngStream b(8);
    const auto cfg = config(300, 10.0, 6, 0.95);
    const auto ra = plan(belief, dyn, cfg, a);
    const auto rb = plan(belief, dyn, cfg, b);
    CHECK(ra.action == rb.action);
    CHECK(ra.visits == rb.visits);
    CHECK(ra.values == rb.values);
}

TEST_CASE("Q equals the mean of the returns credited through each edge") {
    RngStream setup(9);
    const auto model = std::make_shared<const TabularPomdp>(oracle::random_tables(3, 3, 2, setup), 10, 0.9);
    TreeNode root(3);
    RngStream rng(10);
    const auto cfg = config(1, 5.0, 6, 0.9);
    std::vector<double> sums(3, 0.0);
    std::vector<int> counts(3, 0);
    for (int k = 0; k < 2000; ++k) {
        const auto before = root.visits;
        const FeatureValues s{static_cast<int>(rng.uniform_index(3))};
        const double v = simulate(*model, *model, s, 0, root, cfg, rng);
        for (std::size_t a = 0; a < 3; ++a)
            if (root.visits[a] != before[a]) {
                sums[a] += v;
                counts[a]++;
            }
    }
    for (std::size_t a = 0; a < 3; ++a) {
        REQUIRE(counts[a] > 0);
        CHECK(root.values[a] == doctest::Approx(sums[a] / counts[a]).epsilon(1e-10));
        CHECK(root.visits[a] == counts[a]);
    }
    std::int64_t total = 0;
    for (auto v : root.visits) total += v;
    CHECK(root.total == total);
}

TEST_CASE("planning leaves BADDr parameters untouched") {
    auto tiger = std::make_shared<const TigerPomdp>();
    BaddrDynamics dyn(tiger, BaddrConfig{});
    RngStream rng(11);
    auto nets = make_net_pair(tiger->spec(), 3, 8, 0.5, rng);
    const std::vector<double> before(nets.observation.params().begin(), nets.observation.params().end());
    const ParamHandle h = std::make_shared<const BaddrParams>(std::move(nets));
    const ParticleBelief belief(std::vector<AugmentedState>{{FeatureValues{0}, h}, {FeatureValues{1}, h}});
    plan(belief, dyn, config(200, 100.0, 10, 0.95), rng);
    const auto& after = static_cast<const BaddrParams&>(*h).nets().observation.params();
    CHECK(std::equal(before.begin(), before.end(), after.begin(), after.end()));
    CHECK_THROWS(config(0, 1.0, 1, 0.9).validate());
}
