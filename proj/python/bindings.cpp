#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "baddr/harness.hpp"

namespace py = pybind11;
using namespace baddr;

namespace {

ExperimentConfig config_from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    write_config(out, cfg);
    return out.str();
}

py::dict record_dict(const RunRecord& r) {
    py::dict d;
    d["run_id"] = r.run_id;
    d["episode"] = r.episode;
    d["discounted_return"] = r.discounted_return;
    d["steps"] = r.steps;
    d["wall_millis"] = r.wall_millis;
    d["belief_probe_mean"] = r.belief_probe_mean ? py::object(py::float_(*r.belief_probe_mean)) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GBA-POMDP and BADDr experiments";

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_static(
            "defaults",
            [](const std::string& domain, int lanes) { return ExperimentConfig::defaults(parse_domain(domain), lanes); },
            py::arg("domain") = "tiger", py::arg("lanes") = 3)
        .def_static("from_ini", &config_from_text, py::arg("text"))
        .def_static("load", &load_config, py::arg("path"))
        .def("to_ini", &config_to_text)
        .def("validate", &ExperimentConfig::validate)
        .def_property(
            "domain", [](const ExperimentConfig& c) { return to_string(c.domain); },
            [](ExperimentConfig& c, const std::string& v) { c.domain = parse_domain(v); })
        .def_property(
            "method", [](const ExperimentConfig& c) { return to_string(c.method); },
            [](ExperimentConfig& c, const std::string& v) { c.method = parse_method(v); })
        .def_property(
            "filter", [](const ExperimentConfig& c) { return to_string(c.filter); },
            [](ExperimentConfig& c, const std::string& v) { c.filter = parse_filter(v); })
        .def_readwrite("episodes", &ExperimentConfig::episodes)
        .def_readwrite("runs", &ExperimentConfig::runs)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("workers", &ExperimentConfig::workers)
        .def_readwrite("horizon", &ExperimentConfig::horizon)
        .def_readwrite("discount", &ExperimentConfig::discount)
        .def_readwrite("simulations", &ExperimentConfig::simulations)
        .def_readwrite("ucb_constant", &ExperimentConfig::ucb_constant)
        .def_readwrite("depth", &ExperimentConfig::depth)
        .def_readwrite("particles", &ExperimentConfig::particles)
        .def_readwrite("resample_size", &ExperimentConfig::resample_size)
        .def_readwrite("ensemble_size", &ExperimentConfig::ensemble_size)
        .def_readwrite("lanes", &ExperimentConfig::lanes)
        .def_readwrite("probe", &ExperimentConfig::probe)
        .def_property(
            "hidden_nodes", [](const ExperimentConfig& c) { return c.net.hidden_nodes; },
            [](ExperimentConfig& c, int v) { c.net.hidden_nodes = v; })
        .def_property(
            "online_learning_rate", [](const ExperimentConfig& c) { return c.online.online_learning_rate; },
            [](ExperimentConfig& c, double v) { c.online.online_learning_rate = v; })
        .def_property(
            "mc_samples", [](const ExperimentConfig& c) { return c.online.mc_samples; },
            [](ExperimentConfig& c, int v) { c.online.mc_samples = v; })
        .def_property(
            "pretrain_batches", [](const ExperimentConfig& c) { return c.pretrain.batches; },
            [](ExperimentConfig& c, int v) { c.pretrain.batches = v; });

    m.def(
        "run_single",
        [](const ExperimentConfig& cfg, int run_id) {
            std::vector<RunRecord> records;
            {
                py::gil_scoped_release release;
                records = run_single(cfg, run_id);
            }
            py::list out;
            for (const auto& r : records) out.append(record_dict(r));
            return out;
        },
        py::arg("config"), py::arg("run_id") = 0, "Runs one experiment run; returns one dict per episode.");
    m.def(
        "run_experiment",
        [](const ExperimentConfig& cfg, const std::string& out_dir) {
            py::gil_scoped_release release;
            return run_experiment(cfg, out_dir);
        },
        py::arg("config"), py::arg("out_dir"), "Writes run_<r>.csv per run and returns the paths.");
    m.def(
        "aggregate",
        [](const std::string& in_dir, const std::string& out_path, int smoothing) {
            py::list out;
            for (const auto& row : aggregate_directory(in_dir, out_path, smoothing)) {
                py::dict d;
                d["episode"] = row.episode;
                d["mean_return"] = row.mean_return;
                d["stderr"] = row.stderr_return;
                d["n_runs"] = row.n_runs;
                out.append(d);
            }
            return out;
        },
        py::arg("in_dir"), py::arg("out_path"), py::arg("smoothing") = 1);
    m.attr("RUN_CSV_HEADER") = kRunCsvHeader;
    m.attr("AGGREGATE_CSV_HEADER") = kAggregateCsvHeader;
}
