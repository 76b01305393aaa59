#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "baddr/belief.hpp"
#include "baddr/domains.hpp"
#include "baddr/planner.hpp"

namespace baddr {

enum class DomainKind { tiger, roadrace };
enum class Method { baddr, tabular, filtering, pomcp_true };
enum class FilterKind { importance, rejection };

DomainKind parse_domain(const std::string& name);
Method parse_method(const std::string& name);
FilterKind parse_filter(const std::string& name);
PriorMode parse_prior_mode(const std::string& name);
OptimizerKind parse_optimizer(const std::string& name);
std::string to_string(DomainKind domain);
std::string to_string(Method method);
std::string to_string(FilterKind filter);
std::string to_string(PriorMode mode);
std::string to_string(OptimizerKind optimizer);

struct ExperimentConfig {
    DomainKind domain = DomainKind::tiger;
    Method method = Method::baddr;
    int episodes = 400;
    int runs = 10;
    std::uint64_t seed = 0;
    int workers = 1;
    double discount = 0.95;
    int horizon = 30;
    bool record_wall_time = false;

    TigerParams tiger;
    double tiger_prior_mean = 0.7;
    double tiger_prior_concentration = 10.0;

    int lanes = 3;
    int max_distance = 6;
    double penalty = -1.0;

    int simulations = 4096;
    double ucb_constant = 100.0;
    int depth = 30;

    FilterKind filter = FilterKind::importance;
    int particles = 1024;
    int resample_size = 128;
    /// 0 means 1000 x particles.
    std::int64_t max_attempts = 0;

    NetArchitecture net{3, 32, 0.5};
    BaddrConfig online{0.005, 50, true};

    TrainConfig pretrain{0.1, OptimizerKind::sgd, 32, 4096};
    int ensemble_size = 1;
    PriorMode prior = PriorMode::automatic;
    std::string checkpoint;

    double dirichlet_strength = 10.0;
    double dirichlet_floor = 0.01;
    DirichletRootSampling dirichlet_root = DirichletRootSampling::expected;

    bool probe = true;
    int probe_bins = 20;

    /// Default settings for a domain (road race by lane count).
    static ExperimentConfig defaults(DomainKind domain, int lanes = 3);

    std::int64_t effective_max_attempts() const;
    PlannerConfig planner(int steps_left) const;
    void validate() const;
};

/// INI text: sections [experiment] [tiger] [roadrace] [planner] [belief]
/// [nnet] [pretrain] [tabular] [probe]. Keys missing from the file keep
/// the defaults of the chosen domain; unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ExperimentConfig& cfg);

struct RunRecord {
    int run_id = 0;
    int episode = 0;
    double discounted_return = 0.0;
    int steps = 0;
    std::int64_t wall_millis = 0;
    std::optional<double> belief_probe_mean;
};

inline constexpr const char* kRunCsvHeader = "run_id,episode,discounted_return,steps,wall_millis,belief_probe_mean";
inline constexpr const char* kAggregateCsvHeader = "episode,mean_return,stderr,n_runs";

std::shared_ptr<const Pomdp> make_true_model(const ExperimentConfig& cfg);
std::unique_ptr<PriorSimulatorSampler> make_prior_sampler(const ExperimentConfig& cfg);
std::unique_ptr<GbaDynamics> make_dynamics(const ExperimentConfig& cfg, std::shared_ptr<const Domain> domain);
PriorEnsemble make_prior(const ExperimentConfig& cfg, const RngStream& rng);

/// Stream of run `run_id`: seed base_seed + run_id, split by "run".
RngStream run_stream(std::uint64_t base_seed, int run_id);

/// One complete run; `on_episode` (optional) sees every record as it is produced.
std::vector<RunRecord> run_single(const ExperimentConfig& cfg, int run_id,
                                  const std::function<void(const RunRecord&)>& on_episode = {});

/// Runs cfg.runs runs on cfg.workers threads and writes run_<r>.csv files.
/// Returns the written paths in run order.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

void write_run_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_run_csv(std::istream& in);

struct AggregateRow {
    int episode = 0;
    double mean_return = 0.0;
    double stderr_return = 0.0;
    int n_runs = 0;
};

/// Mean and standard error per episode; optional trailing moving average
/// of `smoothing` episodes (1 = none). Throws on misaligned runs.
std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs, int smoothing = 1);
/// Reads every run_*.csv in `in_dir` and writes the aggregate CSV.
std::vector<AggregateRow> aggregate_directory(const std::string& in_dir, const std::string& out_path,
                                              int smoothing = 1);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Shortest round-trip decimal text of a double.
std::string format_double(double value);

}  // namespace baddr
