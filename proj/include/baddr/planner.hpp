#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "baddr/belief.hpp"

namespace baddr {

enum class RolloutPolicy { uniform_random };

struct PlannerConfig {
    int num_simulations = 4096;
    double ucb_constant = 100.0;
    int max_depth = 30;
    double discount = 0.95;
    RolloutPolicy rollout = RolloutPolicy::uniform_random;

    void validate() const;
};

/// Statistics of one action-observation history.
struct TreeNode {
    explicit TreeNode(int action_count);

    std::vector<std::int64_t> visits;  // N(h, a)
    std::vector<double> values;        // Q(h, a)
    std::int64_t total = 0;            // N(h)
    std::unordered_map<std::uint64_t, std::unique_ptr<TreeNode>> children;

    int action_count() const noexcept { return static_cast<int>(visits.size()); }
    TreeNode* child(int action, std::uint64_t observation) const;
    TreeNode& add_child(int action, std::uint64_t observation);
    void record(int action, double value);
};

/// argmax_a Q(h,a) + u sqrt(ln N(h) / N(h,a)); untried actions first; ties uniform.
int ucb_select(const TreeNode& node, double ucb_constant, RngStream& rng);

/// Uniform-random play through `model` from `depth` until terminal or max depth.
double rollout(const Domain& domain, const DynamicsModel& model, std::span<const int> state, int depth,
               const PlannerConfig& cfg, RngStream& rng);

/// One simulation below `node`; updates the statistics on the way back.
double simulate(const Domain& domain, const DynamicsModel& model, std::span<const int> state, int depth,
                TreeNode& node, const PlannerConfig& cfg, RngStream& rng);

struct PlanResult {
    int action = 0;
    std::vector<std::int64_t> visits;
    std::vector<double> values;
};

/// Runs cfg.num_simulations simulations, each from a particle drawn from the
/// belief with a model root-sampled from its θ. No tree is kept afterwards.
PlanResult plan(const ParticleBelief& belief, const GbaDynamics& dynamics, const PlannerConfig& cfg, RngStream& rng);

}  // namespace baddr
