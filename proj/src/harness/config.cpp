#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "baddr/harness.hpp"

namespace baddr {

namespace {

template <typename E>
E parse_enum(const std::string& name, std::initializer_list<std::pair<const char*, E>> table, const char* what) {
    for (const auto& [key, value] : table)
        if (name == key) return value;
    throw std::invalid_argument(std::string("unknown ") + what + " '" + name + "'");
}

template <typename E>
std::string enum_name(E value, std::initializer_list<std::pair<const char*, E>> table) {
    for (const auto& [key, v] : table)
        if (v == value) return key;
    throw std::logic_error("unnamed enum value");
}

constexpr std::initializer_list<std::pair<const char*, DomainKind>> kDomains{{"tiger", DomainKind::tiger},
                                                                            {"roadrace", DomainKind::roadrace}};
constexpr std::initializer_list<std::pair<const char*, Method>> kMethods{{"baddr", Method::baddr},
                                                                        {"tabular", Method::tabular},
                                                                        {"filtering", Method::filtering},
                                                                        {"pomcp_true", Method::pomcp_true}};
constexpr std::initializer_list<std::pair<const char*, FilterKind>> kFilters{{"importance", FilterKind::importance},
                                                                            {"rejection", FilterKind::rejection}};
constexpr std::initializer_list<std::pair<const char*, PriorMode>> kPriorModes{{"auto", PriorMode::automatic},
                                                                              {"expected", PriorMode::expected},
                                                                              {"sampled", PriorMode::sampled}};
constexpr std::initializer_list<std::pair<const char*, OptimizerKind>> kOptimizers{{"sgd", OptimizerKind::sgd},
                                                                                  {"adam", OptimizerKind::adam}};
constexpr std::initializer_list<std::pair<const char*, DirichletRootSampling>> kRoots{
    {"expected", DirichletRootSampling::expected}, {"sampled", DirichletRootSampling::sampled}};

double to_double(const std::string& v) {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
    return x;
}

long long to_int(const std::string& v) {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
    return x;
}

int to_int32(const std::string& v) {
    const long long x = to_int(v);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw std::out_of_range("integer out of range: '" + v + "'");
    return static_cast<int>(x);
}

bool to_bool(std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("not a boolean: '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Field {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

using FieldTable = std::map<std::string, std::map<std::string, Field>>;

#define BADDR_FIELD_D(section, key, member)                                                          \
    t[section][key] = Field{[](ExperimentConfig& c, const std::string& v) { c.member = to_double(v); }, \
                            [](const ExperimentConfig& c) { return format_double(c.member); }}
#define BADDR_FIELD_I(section, key, member)                                                         \
    t[section][key] = Field{[](ExperimentConfig& c, const std::string& v) { c.member = to_int32(v); }, \
                            [](const ExperimentConfig& c) { return std::to_string(c.member); }}
#define BADDR_FIELD_B(section, key, member)                                                        \
    t[section][key] = Field{[](ExperimentConfig& c, const std::string& v) { c.member = to_bool(v); }, \
                            [](const ExperimentConfig& c) { return from_bool(c.member); }}
#define BADDR_FIELD_E(section, key, member, table)                                                   \
    t[section][key] = Field{[](ExperimentConfig& c, const std::string& v) {                          \
                                c.member = parse_enum(v, table, key);                                \
                            },                                                                       \
                            [](const ExperimentConfig& c) { return enum_name(c.member, table); }}

const FieldTable& fields() {
    static const FieldTable table = [] {
        FieldTable t;
        BADDR_FIELD_E("experiment", "domain", domain, kDomains);
        BADDR_FIELD_E("experiment", "method", method, kMethods);
        BADDR_FIELD_I("experiment", "episodes", episodes);
        BADDR_FIELD_I("experiment", "runs", runs);
        t["experiment"]["seed"] =
            Field{[](ExperimentConfig& c, const std::string& v) { c.seed = std::stoull(v); },
                  [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
        BADDR_FIELD_I("experiment", "workers", workers);
        BADDR_FIELD_D("experiment", "discount", discount);
        BADDR_FIELD_I("experiment", "horizon", horizon);
        BADDR_FIELD_B("experiment", "record_wall_time", record_wall_time);

        BADDR_FIELD_D("tiger", "hear_accuracy", tiger.hear_accuracy);
        BADDR_FIELD_D("tiger", "r_listen", tiger.r_listen);
        BADDR_FIELD_D("tiger", "r_correct", tiger.r_correct);
        BADDR_FIELD_D("tiger", "r_wrong", tiger.r_wrong);
        BADDR_FIELD_D("tiger", "prior_mean", tiger_prior_mean);
        BADDR_FIELD_D("tiger", "prior_concentration", tiger_prior_concentration);

        BADDR_FIELD_I("roadrace", "lanes", lanes);
        BADDR_FIELD_I("roadrace", "max_distance", max_distance);
        BADDR_FIELD_D("roadrace", "penalty", penalty);

        BADDR_FIELD_I("planner", "simulations", simulations);
        BADDR_FIELD_D("planner", "ucb", ucb_constant);
        BADDR_FIELD_I("planner", "depth", depth);

        BADDR_FIELD_E("belief", "filter", filter, kFilters);
        BADDR_FIELD_I("belief", "particles", particles);
        BADDR_FIELD_I("belief", "resample_size", resample_size);
        t["belief"]["max_attempts"] =
            Field{[](ExperimentConfig& c, const std::string& v) { c.max_attempts = to_int(v); },
                  [](const ExperimentConfig& c) { return std::to_string(c.max_attempts); }};

        BADDR_FIELD_I("nnet", "layers", net.weight_layers);
        BADDR_FIELD_I("nnet", "nodes", net.hidden_nodes);
        BADDR_FIELD_D("nnet", "dropout", net.p_drop);
        BADDR_FIELD_D("nnet", "online_learning_rate", online.online_learning_rate);
        BADDR_FIELD_I("nnet", "mc_samples", online.mc_samples);
        BADDR_FIELD_B("nnet", "update_with_mask", online.update_with_mask);

        BADDR_FIELD_I("pretrain", "batches", pretrain.batches);
        BADDR_FIELD_I("pretrain", "batch_size", pretrain.batch_size);
        BADDR_FIELD_D("pretrain", "learning_rate", pretrain.learning_rate);
        BADDR_FIELD_E("pretrain", "optimizer", pretrain.optimizer, kOptimizers);
        BADDR_FIELD_I("pretrain", "ensemble_size", ensemble_size);
        BADDR_FIELD_E("pretrain", "prior", prior, kPriorModes);
        t["pretrain"]["checkpoint"] = Field{[](ExperimentConfig& c, const std::string& v) { c.checkpoint = v; },
                                            [](const ExperimentConfig& c) { return c.checkpoint; }};

        BADDR_FIELD_D("tabular", "strength", dirichlet_strength);
        BADDR_FIELD_D("tabular", "floor", dirichlet_floor);
        BADDR_FIELD_E("tabular", "root_sampling", dirichlet_root, kRoots);

        BADDR_FIELD_B("probe", "enabled", probe);
        BADDR_FIELD_I("probe", "bins", probe_bins);
        return t;
    }();
    return table;
}

}  // namespace

DomainKind parse_domain(const std::string& name) { return parse_enum(name, kDomains, "domain"); }
Method parse_method(const std::string& name) { return parse_enum(name, kMethods, "method"); }
FilterKind parse_filter(const std::string& name) { return parse_enum(name, kFilters, "filter"); }
PriorMode parse_prior_mode(const std::string& name) { return parse_enum(name, kPriorModes, "prior mode"); }
OptimizerKind parse_optimizer(const std::string& name) { return parse_enum(name, kOptimizers, "optimizer"); }
std::string to_string(DomainKind domain) { return enum_name(domain, kDomains); }
std::string to_string(Method method) { return enum_name(method, kMethods); }
std::string to_string(FilterKind filter) { return enum_name(filter, kFilters); }
std::string to_string(PriorMode mode) { return enum_name(mode, kPriorModes); }
std::string to_string(OptimizerKind optimizer) { return enum_name(optimizer, kOptimizers); }

ExperimentConfig ExperimentConfig::defaults(DomainKind domain, int lanes) {
    ExperimentConfig c;
    c.domain = domain;
    if (domain == DomainKind::tiger) return c;

    c.lanes = lanes;
    c.horizon = 20;
    c.simulations = 128;
    c.ucb_constant = 15.0;
    c.depth = 3;
    c.filter = FilterKind::rejection;
    c.particles = 1024;
    c.ensemble_size = 1;
    c.probe = false;
    c.net.weight_layers = 3;
    c.net.p_drop = 0.1;
    c.pretrain.optimizer = OptimizerKind::sgd;
    if (lanes >= 9) {
        c.net.hidden_nodes = 256;
        c.online.online_learning_rate = 0.0001;
        c.pretrain.batches = 16384;
        c.pretrain.batch_size = 256;
        c.pretrain.learning_rate = 0.0025;
        c.episodes = 300;
    } else {
        c.net.hidden_nodes = 32;
        c.online.online_learning_rate = 0.001;
        c.pretrain.batches = 2048;
        c.pretrain.batch_size = 64;
        c.pretrain.learning_rate = 0.005;
        c.episodes = 200;
    }
    return c;
}

std::int64_t ExperimentConfig::effective_max_attempts() const {
    return max_attempts > 0 ? max_attempts : 1000 * static_cast<std::int64_t>(particles);
}

PlannerConfig ExperimentConfig::planner(int steps_left) const {
    PlannerConfig p;
    p.num_simulations = simulations;
    p.ucb_constant = ucb_constant;
    p.max_depth = std::min(depth, steps_left);
    p.discount = discount;
    return p;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const char* message) {
        if (!ok) throw std::invalid_argument(message);
    };
    require(episodes >= 0, "episodes must be non-negative");
    require(runs >= 1, "runs must be positive");
    require(workers >= 1, "workers must be positive");
    require(discount >= 0.0 && discount <= 1.0, "discount must lie in [0, 1]");
    require(horizon >= 1, "horizon must be positive");
    require(simulations >= 1, "simulations must be positive");
    require(ucb_constant >= 0.0, "ucb constant must be non-negative");
    require(depth >= 1, "planning depth must be positive");
    require(particles >= 1, "particles must be positive");
    require(resample_size >= 1, "resample size must be positive");
    require(max_attempts >= 0, "max_attempts must be non-negative");
    require(probe_bins >= 1, "probe bins must be positive");
    if (domain == DomainKind::tiger) {
        tiger.validate();
        require(tiger_prior_mean > 0.5 && tiger_prior_mean <= 1.0, "tiger prior mean must lie in (0.5, 1]");
        require(tiger_prior_concentration > 0.0, "tiger prior concentration must be positive");
    } else {
        RoadRaceParams::with_lanes(lanes, max_distance).validate();
    }
    if (method == Method::baddr || method == Method::filtering) {
        require(net.weight_layers >= 1, "nnet layers must be positive");
        require(net.hidden_nodes >= 1, "nnet nodes must be positive");
        require(net.p_drop >= 0.0 && net.p_drop < 1.0, "dropout must lie in [0, 1)");
        require(online.online_learning_rate >= 0.0, "online learning rate must be non-negative");
        require(online.mc_samples >= 1, "mc_samples must be positive");
        pretrain.validate();
    }
    if (method != Method::pomcp_true) require(ensemble_size >= 1, "ensemble size must be positive");
    if (method == Method::tabular) {
        require(dirichlet_strength >= 0.0, "Dirichlet strength must be non-negative");
        require(dirichlet_floor > 0.0, "Dirichlet floor must be positive");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    const auto& table = fields();
    for (const auto& [section, body] : tree) {
        const auto it = table.find(section);
        if (it == table.end()) throw std::invalid_argument("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            if (!it->second.count(key))
                throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
            (void)value;
        }
    }
    const DomainKind domain = parse_domain(tree.get<std::string>("experiment.domain", "tiger"));
    const int lanes = tree.get<int>("roadrace.lanes", 3);
    ExperimentConfig cfg = ExperimentConfig::defaults(domain, lanes);
    for (const auto& [section, body] : tree) {
        for (const auto& [key, value] : body) {
            try {
                table.at(section).at(key).set(cfg, value.get_value<std::string>());
            } catch (const std::exception& e) {
                throw std::invalid_argument("config: [" + section + "] " + key + ": " + e.what());
            }
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
    bool first = true;
    for (const auto& [section, keys] : fields()) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& [key, field] : keys) out << key << " = " << field.get(cfg) << '\n';
    }
}

}  // namespace baddr
