#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/container/flat_map.hpp>

#include "baddr/domains.hpp"
#include "baddr/nnet.hpp"
#include "baddr/pomdp.hpp"

namespace baddr {

/// Dynamics parameters θ of one particle. Handles are immutable once
/// created and may be shared between particles; an update yields a new one.
class ModelParams {
public:
    virtual ~ModelParams() = default;
};

using ParamHandle = std::shared_ptr<const ModelParams>;

/// GBA-POMDP state (s, θ).
struct AugmentedState {
    FeatureValues state;
    ParamHandle params;
};

struct AugmentedStep {
    ParamHandle params;
    FeatureValues next;
    FeatureValues observation;
};

/// Augmented dynamics D̄(θ', s', o | s, θ, a) = I(θ' = U(θ, s, a, s', o)) p(s', o | θ, s, a).
///
/// The reward and terminal predicate come from the (known) domain. Methods
/// taking an RngStream are deterministic given its state; for BADDr the
/// likelihoods are Monte-Carlo estimates and the update draws a dropout mask.
class GbaDynamics {
public:
    explicit GbaDynamics(std::shared_ptr<const Domain> domain);
    virtual ~GbaDynamics() = default;

    const Domain& domain() const noexcept { return *domain_; }
    const std::shared_ptr<const Domain>& domain_ptr() const noexcept { return domain_; }
    const PomdpSpec& spec() const { return domain_->spec(); }

    /// (s', o) ~ p(· | θ, s, a) without updating θ.
    virtual void sample(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                        FeatureValues& next, FeatureValues& observation) const = 0;

    /// s' from the transition part only.
    virtual void sample_next_state(const ModelParams& params, std::span<const int> state, int action,
                                   RngStream& rng, FeatureValues& next) const = 0;

    /// p(o | θ, s, a, s').
    virtual double observation_likelihood(const ModelParams& params, std::span<const int> state, int action,
                                          std::span<const int> next, std::span<const int> observation,
                                          RngStream& rng) const = 0;

    /// p(s', o | θ, s, a).
    virtual double likelihood(const ModelParams& params, std::span<const int> state, int action,
                              std::span<const int> next, std::span<const int> observation, RngStream& rng) const = 0;

    /// U(θ, s, a, s', o).
    virtual ParamHandle update(const ParamHandle& params, std::span<const int> state, int action,
                               std::span<const int> next, std::span<const int> observation, RngStream& rng) const = 0;

    /// A concrete model used unchanged for a whole planning simulation.
    virtual std::unique_ptr<DynamicsModel> root_sample(const ParamHandle& params, RngStream& rng) const = 0;

    /// Full augmented transition: sample then update.
    AugmentedStep step(const AugmentedState& state, int action, RngStream& rng) const;

private:
    std::shared_ptr<const Domain> domain_;
};

// ---------------------------------------------------------------------------
// Tabular Dirichlet realization (BA-POMDP)

/// Dense prior counts over flat indices. transition[(s * A + a) * S + s'],
/// observation[((s * A + a) * S + s') * O + o]; every count must be > 0.
struct DirichletTable {
    std::uint64_t states = 0;
    int actions = 0;
    std::uint64_t observations = 0;
    std::vector<double> transition;
    std::vector<double> observation;
    std::vector<double> transition_totals;
    std::vector<double> observation_totals;

    DirichletTable(std::uint64_t states, int actions, std::uint64_t observations, std::vector<double> transition,
                   std::vector<double> observation);

    /// `strength` times the exact probabilities of `model`, plus `floor`
    /// everywhere to keep every count positive.
    static DirichletTable from_model(const Pomdp& model, double strength, double floor);

    std::uint64_t transition_index(std::uint64_t s, int a, std::uint64_t s_next) const {
        return (s * static_cast<std::uint64_t>(actions) + static_cast<std::uint64_t>(a)) * states + s_next;
    }
    std::uint64_t observation_index(std::uint64_t s, int a, std::uint64_t s_next, std::uint64_t o) const {
        return transition_index(s, a, s_next) * observations + o;
    }
};

/// Dirichlet counts: shared prior table plus sparse per-particle increments.
class DirichletParams final : public ModelParams {
public:
    explicit DirichletParams(std::shared_ptr<const DirichletTable> prior);

    const DirichletTable& prior() const noexcept { return *prior_; }

    double transition_count(std::uint64_t s, int a, std::uint64_t s_next) const;
    double transition_total(std::uint64_t s, int a) const;
    double observation_count(std::uint64_t s, int a, std::uint64_t s_next, std::uint64_t o) const;
    double observation_total(std::uint64_t s, int a, std::uint64_t s_next) const;

    /// Copy with the (s, a, s') and (s, a, s', o) counts each raised by one.
    DirichletParams incremented(std::uint64_t s, int a, std::uint64_t s_next, std::uint64_t o) const;

    /// Number of increments applied since the prior.
    std::int64_t increments() const noexcept { return increments_; }

private:
    using Delta = boost::container::flat_map<std::uint64_t, double>;
    static double lookup(const Delta& d, std::uint64_t key);

    std::shared_ptr<const DirichletTable> prior_;
    Delta transition_delta_;
    Delta transition_total_delta_;
    Delta observation_delta_;
    Delta observation_total_delta_;
    std::int64_t increments_ = 0;
};

/// Joint predictive over flat (s', o), index flat(s') * |O| + flat(o).
std::vector<double> dirichlet_predictive(const DirichletParams& d, std::uint64_t s, int a);

struct DirichletStep {
    DirichletParams params;
    std::uint64_t next;
    std::uint64_t observation;
};

DirichletStep dirichlet_step(const DirichletParams& d, std::uint64_t s, int a, RngStream& rng);

enum class DirichletRootSampling { expected, sampled };

class DirichletDynamics final : public GbaDynamics {
public:
    DirichletDynamics(std::shared_ptr<const Domain> domain, DirichletRootSampling root = DirichletRootSampling::expected);

    void sample(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                FeatureValues& next, FeatureValues& observation) const override;
    void sample_next_state(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                           FeatureValues& next) const override;
    double observation_likelihood(const ModelParams& params, std::span<const int> state, int action,
                                  std::span<const int> next, std::span<const int> observation,
                                  RngStream& rng) const override;
    double likelihood(const ModelParams& params, std::span<const int> state, int action, std::span<const int> next,
                      std::span<const int> observation, RngStream& rng) const override;
    ParamHandle update(const ParamHandle& params, std::span<const int> state, int action, std::span<const int> next,
                       std::span<const int> observation, RngStream& rng) const override;
    std::unique_ptr<DynamicsModel> root_sample(const ParamHandle& params, RngStream& rng) const override;

private:
    DirichletRootSampling root_;
};

// ---------------------------------------------------------------------------
// BADDr realization

struct BaddrConfig {
    double online_learning_rate = 0.005;
    /// Dropout samples for likelihood estimates.
    int mc_samples = 50;
    /// Draw a fresh dropout mask for the one-step update (else full network).
    bool update_with_mask = true;
};

class BaddrParams final : public ModelParams {
public:
    explicit BaddrParams(NetPair nets) : nets_(std::move(nets)) {}
    const NetPair& nets() const noexcept { return nets_; }

private:
    NetPair nets_;
};

class BaddrDynamics final : public GbaDynamics {
public:
    BaddrDynamics(std::shared_ptr<const Domain> domain, BaddrConfig config);

    const BaddrConfig& config() const noexcept { return config_; }

    void sample(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                FeatureValues& next, FeatureValues& observation) const override;
    void sample_next_state(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                           FeatureValues& next) const override;
    double observation_likelihood(const ModelParams& params, std::span<const int> state, int action,
                                  std::span<const int> next, std::span<const int> observation,
                                  RngStream& rng) const override;
    double likelihood(const ModelParams& params, std::span<const int> state, int action, std::span<const int> next,
                      std::span<const int> observation, RngStream& rng) const override;
    ParamHandle update(const ParamHandle& params, std::span<const int> state, int action, std::span<const int> next,
                       std::span<const int> observation, RngStream& rng) const override;
    std::unique_ptr<DynamicsModel> root_sample(const ParamHandle& params, RngStream& rng) const override;

private:
    BaddrConfig config_;
};

/// One gradient-descent step of -log p(s', o | s, a) on a copy of `nets`.
NetPair baddr_update(const NetPair& nets, const PomdpSpec& spec, std::span<const int> state, int action,
                     std::span<const int> next, std::span<const int> observation, const BaddrConfig& cfg,
                     RngStream& rng);

struct BaddrStep {
    NetPair nets;
    FeatureValues next;
    FeatureValues observation;
};

/// Dropout-sample the pair, draw (s', o) from it, then update on that datapoint.
BaddrStep baddr_step(const NetPair& nets, const PomdpSpec& spec, std::span<const int> state, int action,
                     const BaddrConfig& cfg, RngStream& rng);

// ---------------------------------------------------------------------------
// Known dynamics (no learning): θ names a fixed simulator.

class SimulatorParams final : public ModelParams {
public:
    explicit SimulatorParams(std::shared_ptr<const Pomdp> model) : model_(std::move(model)) {}
    const Pomdp& model() const noexcept { return *model_; }
    const std::shared_ptr<const Pomdp>& model_ptr() const noexcept { return model_; }

private:
    std::shared_ptr<const Pomdp> model_;
};

class SimulatorDynamics final : public GbaDynamics {
public:
    using GbaDynamics::GbaDynamics;

    void sample(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                FeatureValues& next, FeatureValues& observation) const override;
    void sample_next_state(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                           FeatureValues& next) const override;
    double observation_likelihood(const ModelParams& params, std::span<const int> state, int action,
                                  std::span<const int> next, std::span<const int> observation,
                                  RngStream& rng) const override;
    double likelihood(const ModelParams& params, std::span<const int> state, int action, std::span<const int> next,
                      std::span<const int> observation, RngStream& rng) const override;
    ParamHandle update(const ParamHandle& params, std::span<const int> state, int action, std::span<const int> next,
                       std::span<const int> observation, RngStream& rng) const override;
    std::unique_ptr<DynamicsModel> root_sample(const ParamHandle& params, RngStream& rng) const override;
};

// ---------------------------------------------------------------------------
// Prior construction

struct NetArchitecture {
    int weight_layers = 3;
    int hidden_nodes = 32;
    double p_drop = 0.5;
};

/// Which simulators the members are trained on. `automatic` uses the
/// expected simulator for a single member and sampled ones otherwise.
enum class PriorMode { automatic, expected, sampled };

struct PriorEnsemble {
    std::vector<ParamHandle> members;

    std::size_t size() const noexcept { return members.size(); }
};

/// Each member: a fresh simulator from `sampler`, then pretrain_member on a
/// freshly initialized pair. Member k uses the stream rng.split(k).
PriorEnsemble build_prior_ensemble(const PriorSimulatorSampler& sampler, int member_count, const TrainConfig& cfg,
                                   const NetArchitecture& arch, PriorMode mode, const RngStream& rng);

/// Dirichlet members built from simulator draws via DirichletTable::from_model.
PriorEnsemble build_dirichlet_ensemble(const PriorSimulatorSampler& sampler, int member_count, double strength,
                                       double floor, PriorMode mode, const RngStream& rng);

/// Simulator members (no learning), for filtering over known models.
PriorEnsemble build_simulator_ensemble(const PriorSimulatorSampler& sampler, int member_count, PriorMode mode,
                                       const RngStream& rng);

/// Writes `manifest.txt` listing member files `member_<k>.txt` in `directory`.
void save_ensemble(const std::string& directory, const PriorEnsemble& ensemble);
PriorEnsemble load_ensemble(const std::string& directory);

}  // namespace baddr
