#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "baddr/harness.hpp"

namespace baddr {

std::shared_ptr<const Pomdp> make_true_model(const ExperimentConfig& cfg) {
    if (cfg.domain == DomainKind::tiger) return std::make_shared<TigerPomdp>(cfg.tiger, cfg.horizon, cfg.discount);
    RoadRaceParams params = RoadRaceParams::with_lanes(cfg.lanes, cfg.max_distance);
    params.penalty = cfg.penalty;
    return std::make_shared<RoadRacePomdp>(params, cfg.horizon, cfg.discount);
}

std::unique_ptr<PriorSimulatorSampler> make_prior_sampler(const ExperimentConfig& cfg) {
    if (cfg.domain == DomainKind::tiger)
        return std::make_unique<TigerPriorSampler>(cfg.tiger, cfg.tiger_prior_mean, cfg.tiger_prior_concentration,
                                                   cfg.horizon, cfg.discount);
    RoadRaceParams params = RoadRaceParams::with_lanes(cfg.lanes, cfg.max_distance);
    params.penalty = cfg.penalty;
    return std::make_unique<RoadRacePriorSampler>(params, cfg.horizon, cfg.discount);
}

std::unique_ptr<GbaDynamics> make_dynamics(const ExperimentConfig& cfg, std::shared_ptr<const Domain> domain) {
    switch (cfg.method) {
        case Method::baddr:
        case Method::filtering:
            return std::make_unique<BaddrDynamics>(std::move(domain), cfg.online);
        case Method::tabular:
            return std::make_unique<DirichletDynamics>(std::move(domain), cfg.dirichlet_root);
        case Method::pomcp_true:
            return std::make_unique<SimulatorDynamics>(std::move(domain));
    }
    throw std::logic_error("unhandled method");
}

PriorEnsemble make_prior(const ExperimentConfig& cfg, const RngStream& rng) {
    if (cfg.method == Method::pomcp_true) {
        PriorEnsemble out;
        out.members.push_back(std::make_shared<const SimulatorParams>(make_true_model(cfg)));
        return out;
    }
    const auto sampler = make_prior_sampler(cfg);
    if (cfg.method == Method::tabular)
        return build_dirichlet_ensemble(*sampler, cfg.ensemble_size, cfg.dirichlet_strength, cfg.dirichlet_floor,
                                        cfg.prior, rng);
    if (!cfg.checkpoint.empty()) return load_ensemble(cfg.checkpoint);
    return build_prior_ensemble(*sampler, cfg.ensemble_size, cfg.pretrain, cfg.net, cfg.prior, rng);
}

RngStream run_stream(std::uint64_t base_seed, int run_id) {
    return RngStream(base_seed + static_cast<std::uint64_t>(run_id)).split("run");
}

namespace {

class BayesAdaptiveAgent final : public Agent {
public:
    BayesAdaptiveAgent(const ExperimentConfig& cfg, const GbaDynamics& dynamics, ParticleBelief belief, int run_id)
        : cfg_(cfg), dynamics_(dynamics), belief_(std::move(belief)), run_id_(run_id) {}

    const ParticleBelief& belief() const noexcept { return belief_; }
    int episode = 0;

    void begin_episode(RngStream& rng) override {
        if (episode > 0) {
            const bool filtering = cfg_.method == Method::filtering;
            if (belief_.mode() == BeliefMode::weighted)
                belief_ = belief_.resampled(static_cast<std::size_t>(cfg_.particles),
                                            filtering ? BeliefMode::weighted : BeliefMode::unweighted, rng);
        }
        belief_ = reset_belief_states(belief_, dynamics_.domain(), rng);
    }

    int act(int steps_left, RngStream& rng) override {
        return plan(belief_, dynamics_, cfg_.planner(steps_left), rng).action;
    }

    void observe(int action, std::span<const int> observation, RngStream& rng) override {
        try {
            if (cfg_.method == Method::filtering) {
                belief_ = filtering_update(belief_, action, observation, dynamics_, rng);
            } else if (cfg_.filter == FilterKind::rejection) {
                belief_ = rejection_update(belief_, action, observation, static_cast<std::size_t>(cfg_.particles),
                                           dynamics_, static_cast<std::size_t>(cfg_.effective_max_attempts()), rng);
            } else {
                belief_ = importance_update(belief_, action, observation, static_cast<std::size_t>(cfg_.resample_size),
                                            dynamics_, rng);
            }
        } catch (const BeliefUpdateFailure& e) {
            spdlog::warn("run {} episode {}: belief update failed ({}); recovering states from the observation",
                         run_id_, episode, e.what());
            std::vector<AugmentedState> particles = belief_.particles();
            for (auto& p : particles) p.state = dynamics_.domain().recovery_state(p.state, action, observation, rng);
            belief_ = belief_.mode() == BeliefMode::unweighted ? ParticleBelief(std::move(particles))
                                                               : ParticleBelief(std::move(particles), belief_.weights());
        }
    }

private:
    const ExperimentConfig& cfg_;
    const GbaDynamics& dynamics_;
    ParticleBelief belief_;
    int run_id_;
};

}  // namespace

std::vector<RunRecord> run_single(const ExperimentConfig& cfg, int run_id,
                                  const std::function<void(const RunRecord&)>& on_episode) {
    cfg.validate();
    const RngStream root = run_stream(cfg.seed, run_id);
    const auto model = make_true_model(cfg);
    const auto dynamics = make_dynamics(cfg, model);
    const PriorEnsemble prior = make_prior(cfg, root.split("prior"));
    RngStream belief_rng = root.split("belief");
    ParticleBelief belief = initial_belief(prior, *model, static_cast<std::size_t>(cfg.particles), belief_rng);
    if (cfg.method == Method::filtering) belief = ParticleBelief(belief.particles(), BeliefMode::weighted);

    BayesAdaptiveAgent agent(cfg, *dynamics, std::move(belief), run_id);
    SimulatedEnvironment env(model);
    const bool probe = cfg.probe && cfg.domain == DomainKind::tiger;
    std::vector<RunRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.episodes));
    for (int e = 0; e < cfg.episodes; ++e) {
        const RngStream episode_root = root.split("episode").split(static_cast<std::uint64_t>(e));
        RngStream rng = episode_root.split("act");
        agent.episode = e;
        const EpisodeResult result = run_episode(env, agent, model->spec(), rng);
        RunRecord record;
        record.run_id = run_id;
        record.episode = e;
        record.discounted_return = result.discounted_return;
        record.steps = result.steps;
        record.wall_millis = cfg.record_wall_time ? result.wall_millis : 0;
        if (probe) {
            RngStream probe_rng = episode_root.split("probe");
            record.belief_probe_mean = tiger_hear_probe(agent.belief(), *dynamics, probe_rng, cfg.probe_bins).mean;
        }
        if (on_episode) on_episode(record);
        records.push_back(record);
    }
    return records;
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    cfg.validate();
    fs::create_directories(out_dir);
    std::vector<std::string> paths(static_cast<std::size_t>(cfg.runs));
    for (int r = 0; r < cfg.runs; ++r)
        paths[static_cast<std::size_t>(r)] = (fs::path(out_dir) / ("run_" + std::to_string(r) + ".csv")).string();

    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (int r = next++; r < cfg.runs; r = next++) {
            try {
                spdlog::info("run {} started", r);
                const auto records = run_single(cfg, r);
                std::ofstream out(paths[static_cast<std::size_t>(r)], std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + paths[static_cast<std::size_t>(r)]);
                write_run_csv(out, records);
                double tail = 0.0;
                const int window = std::min<int>(50, static_cast<int>(records.size()));
                for (int k = static_cast<int>(records.size()) - window; k < static_cast<int>(records.size()); ++k)
                    tail += records[static_cast<std::size_t>(k)].discounted_return;
                spdlog::info("run {} finished, mean of last {} episodes {:.3f}", r, window,
                             window > 0 ? tail / window : 0.0);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = cfg.runs;
            }
        }
    };
    const int threads = std::min(cfg.workers, cfg.runs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return paths;
}

}  // namespace baddr
