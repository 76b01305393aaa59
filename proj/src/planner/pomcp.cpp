#include <cmath>
#include <limits>
#include <stdexcept>

#include "baddr/planner.hpp"

namespace baddr {

void PlannerConfig::validate() const {
    if (num_simulations < 1) throw std::invalid_argument("planner needs at least one simulation");
    if (!(ucb_constant >= 0.0)) throw std::invalid_argument("ucb constant must be non-negative");
    if (max_depth < 0) throw std::invalid_argument("max depth must be non-negative");
    if (!(discount >= 0.0 && discount <= 1.0)) throw std::invalid_argument("discount must lie in [0, 1]");
}

TreeNode::TreeNode(int action_count)
    : visits(static_cast<std::size_t>(action_count), 0), values(static_cast<std::size_t>(action_count), 0.0) {
    if (action_count < 1) throw std::invalid_argument("a tree node needs at least one action");
}

namespace {

std::uint64_t edge_key(int action_count, int action, std::uint64_t observation) {
    return observation * static_cast<std::uint64_t>(action_count) + static_cast<std::uint64_t>(action);
}

int argmax_random(std::span<const double> scores, std::span<const std::int64_t> visits, bool visited_only,
                  RngStream& rng) {
    double best = -std::numeric_limits<double>::infinity();
    int chosen = -1;
    int ties = 0;
    for (int a = 0; a < static_cast<int>(scores.size()); ++a) {
        if (visited_only && visits[static_cast<std::size_t>(a)] == 0) continue;
        const double v = scores[static_cast<std::size_t>(a)];
        if (chosen < 0 || v > best) {
            best = v;
            chosen = a;
            ties = 1;
        } else if (v == best && rng.uniform_index(static_cast<std::size_t>(++ties)) == 0) {
            chosen = a;
        }
    }
    return chosen < 0 ? static_cast<int>(rng.uniform_index(scores.size())) : chosen;
}

}  // namespace

TreeNode* TreeNode::child(int action, std::uint64_t observation) const {
    const auto it = children.find(edge_key(action_count(), action, observation));
    return it == children.end() ? nullptr : it->second.get();
}

TreeNode& TreeNode::add_child(int action, std::uint64_t observation) {
    auto& slot = children[edge_key(action_count(), action, observation)];
    if (!slot) slot = std::make_unique<TreeNode>(action_count());
    return *slot;
}

void TreeNode::record(int action, double value) {
    const auto a = static_cast<std::size_t>(action);
    ++total;
    ++visits[a];
    values[a] += (value - values[a]) / static_cast<double>(visits[a]);
}

int ucb_select(const TreeNode& node, double ucb_constant, RngStream& rng) {
    const int n = node.action_count();
    int untried = 0;
    for (int a = 0; a < n; ++a)
        if (node.visits[static_cast<std::size_t>(a)] == 0) ++untried;
    if (untried > 0) {
        auto pick = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(untried)));
        for (int a = 0; a < n; ++a)
            if (node.visits[static_cast<std::size_t>(a)] == 0 && pick-- == 0) return a;
    }
    thread_local std::vector<double> scores;
    scores.resize(static_cast<std::size_t>(n));
    const double log_total = std::log(static_cast<double>(node.total));
    for (int a = 0; a < n; ++a) {
        const auto i = static_cast<std::size_t>(a);
        scores[i] = node.values[i] + ucb_constant * std::sqrt(log_total / static_cast<double>(node.visits[i]));
    }
    return argmax_random(scores, node.visits, false, rng);
}

double rollout(const Domain& domain, const DynamicsModel& model, std::span<const int> state, int depth,
               const PlannerConfig& cfg, RngStream& rng) {
    const auto actions = static_cast<std::size_t>(domain.spec().action_count);
    FeatureValues s(state.begin(), state.end());
    FeatureValues next;
    FeatureValues observation;
    double total = 0.0;
    double scale = 1.0;
    for (int d = depth; d < cfg.max_depth; ++d) {
        const int a = static_cast<int>(rng.uniform_index(actions));
        model.sample(s, a, rng, next, observation);
        total += scale * domain.reward(s, a, next);
        if (domain.terminal(s, a, next)) break;
        scale *= cfg.discount;
        s.swap(next);
    }
    return total;
}

double simulate(const Domain& domain, const DynamicsModel& model, std::span<const int> state, int depth,
                TreeNode& node, const PlannerConfig& cfg, RngStream& rng) {
    if (depth >= cfg.max_depth) return 0.0;
    const int a = ucb_select(node, cfg.ucb_constant, rng);
    FeatureValues next;
    FeatureValues observation;
    model.sample(state, a, rng, next, observation);
    double value = domain.reward(state, a, next);
    if (!domain.terminal(state, a, next)) {
        const std::uint64_t o = domain.spec().observation_space.flat_index(observation);
        if (TreeNode* child = node.child(a, o)) {
            value += cfg.discount * simulate(domain, model, next, depth + 1, *child, cfg, rng);
        } else {
            node.add_child(a, o);
            value += cfg.discount * rollout(domain, model, next, depth + 1, cfg, rng);
        }
    }
    node.record(a, value);
    return value;
}

PlanResult plan(const ParticleBelief& belief, const GbaDynamics& dynamics, const PlannerConfig& cfg, RngStream& rng) {
    cfg.validate();
    const Domain& domain = dynamics.domain();
    TreeNode root(domain.spec().action_count);
    for (int k = 0; k < cfg.num_simulations; ++k) {
        const AugmentedState& particle = belief.particle(belief.sample_index(rng));
        const auto model = dynamics.root_sample(particle.params, rng);
        simulate(domain, *model, particle.state, 0, root, cfg, rng);
    }
    PlanResult out;
    out.action = argmax_random(root.values, root.visits, true, rng);
    out.visits = root.visits;
    out.values = root.values;
    return out;
}

}  // namespace baddr
