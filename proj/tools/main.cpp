#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "baddr/harness.hpp"

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("baddr"));
    CLI::App app{"Bayes-adaptive POMDP learning with dropout networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int runs = 0;
    long long seed = -1;
    std::string method;
    int workers = 0;
    auto* run = app.add_subcommand("run", "run an experiment and write run_<r>.csv files");
    run->add_option("--config", config_path, "INI experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--runs", runs, "number of runs")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "base seed")->check(CLI::NonNegativeNumber);
    run->add_option("--method", method, "baddr, tabular, filtering or pomcp_true");
    run->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);

    std::string in_dir;
    std::string out_file;
    int smoothing = 1;
    auto* aggregate = app.add_subcommand("aggregate", "average run CSVs per episode");
    aggregate->add_option("--in", in_dir, "directory holding run_<r>.csv")->required()->check(CLI::ExistingDirectory);
    aggregate->add_option("--out", out_file, "aggregate CSV path")->required();
    aggregate->add_option("--smoothing", smoothing, "trailing moving-average window")->check(CLI::PositiveNumber);

    std::string pretrain_config;
    std::string pretrain_out;
    long long pretrain_seed = 0;
    auto* pretrain = app.add_subcommand("pretrain", "build a prior ensemble and save it as a checkpoint directory");
    pretrain->add_option("--config", pretrain_config, "INI experiment config")->required()->check(CLI::ExistingFile);
    pretrain->add_option("--out", pretrain_out, "checkpoint directory")->required();
    pretrain->add_option("--seed", pretrain_seed, "base seed; the ensemble equals the prior of run 0")->check(CLI::NonNegativeNumber);

    std::string show_path;
    std::string show_domain = "tiger";
    int show_lanes = 3;
    auto* show = app.add_subcommand("config", "print the effective config, or the defaults of a domain");
    show->add_option("--config", show_path, "INI experiment config")->check(CLI::ExistingFile);
    show->add_option("--domain", show_domain, "tiger or roadrace");
    show->add_option("--lanes", show_lanes, "road race lanes")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            baddr::ExperimentConfig cfg = baddr::load_config(config_path);
            if (runs > 0) cfg.runs = runs;
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (!method.empty()) cfg.method = baddr::parse_method(method);
            if (workers > 0) cfg.workers = workers;
            cfg.validate();
            for (const auto& path : baddr::run_experiment(cfg, out_dir)) std::cout << path << '\n';
        } else if (*aggregate) {
            const auto rows = baddr::aggregate_directory(in_dir, out_file, smoothing);
            std::cout << out_file << " (" << rows.size() << " episodes)\n";
        } else if (*pretrain) {
            const baddr::ExperimentConfig cfg = baddr::load_config(pretrain_config);
            if (cfg.method != baddr::Method::baddr && cfg.method != baddr::Method::filtering)
                throw std::invalid_argument("pretrain needs method baddr or filtering");
            baddr::ExperimentConfig fresh = cfg;
            fresh.checkpoint.clear();
            const auto ensemble =
                baddr::make_prior(fresh, baddr::run_stream(static_cast<std::uint64_t>(pretrain_seed), 0).split("prior"));
            baddr::save_ensemble(pretrain_out, ensemble);
            std::cout << pretrain_out << " (" << ensemble.size() << " members)\n";
        } else if (*show) {
            const baddr::ExperimentConfig cfg =
                show_path.empty() ? baddr::ExperimentConfig::defaults(baddr::parse_domain(show_domain), show_lanes)
                                  : baddr::load_config(show_path);
            baddr::write_config(std::cout, cfg);
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
