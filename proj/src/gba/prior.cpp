#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "baddr/gba.hpp"

namespace baddr {

namespace {

std::shared_ptr<const Pomdp> member_simulator(const PriorSimulatorSampler& sampler, int member_count, PriorMode mode,
                                              RngStream& rng) {
    const bool expected = mode == PriorMode::expected || (mode == PriorMode::automatic && member_count == 1);
    return expected ? sampler.expected() : sampler.sample(rng);
}

void check_count(int member_count) {
    if (member_count < 1) throw std::invalid_argument("a prior ensemble needs at least one member");
}

}  // namespace

PriorEnsemble build_prior_ensemble(const PriorSimulatorSampler& sampler, int member_count, const TrainConfig& cfg,
                                   const NetArchitecture& arch, PriorMode mode, const RngStream& rng) {
    check_count(member_count);
    cfg.validate();
    PriorEnsemble out;
    for (int k = 0; k < member_count; ++k) {
        const RngStream member = rng.split(static_cast<std::uint64_t>(k));
        RngStream sim_rng = member.split("simulator");
        RngStream init_rng = member.split("init");
        RngStream train_rng = member.split("train");
        const auto simulator = member_simulator(sampler, member_count, mode, sim_rng);
        NetPair pair = make_net_pair(simulator->spec(), arch.weight_layers, arch.hidden_nodes, arch.p_drop, init_rng);
        pair = pretrain_member(*simulator, cfg, std::move(pair), train_rng);
        out.members.push_back(std::make_shared<const BaddrParams>(std::move(pair)));
    }
    return out;
}

PriorEnsemble build_dirichlet_ensemble(const PriorSimulatorSampler& sampler, int member_count, double strength,
                                       double floor, PriorMode mode, const RngStream& rng) {
    check_count(member_count);
    PriorEnsemble out;
    for (int k = 0; k < member_count; ++k) {
        RngStream sim_rng = rng.split(static_cast<std::uint64_t>(k)).split("simulator");
        const auto simulator = member_simulator(sampler, member_count, mode, sim_rng);
        auto table = std::make_shared<const DirichletTable>(DirichletTable::from_model(*simulator, strength, floor));
        out.members.push_back(std::make_shared<const DirichletParams>(std::move(table)));
    }
    return out;
}

PriorEnsemble build_simulator_ensemble(const PriorSimulatorSampler& sampler, int member_count, PriorMode mode,
                                       const RngStream& rng) {
    check_count(member_count);
    PriorEnsemble out;
    for (int k = 0; k < member_count; ++k) {
        RngStream sim_rng = rng.split(static_cast<std::uint64_t>(k)).split("simulator");
        out.members.push_back(std::make_shared<const SimulatorParams>(member_simulator(sampler, member_count, mode, sim_rng)));
    }
    return out;
}

void save_ensemble(const std::string& directory, const PriorEnsemble& ensemble) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::ofstream manifest(fs::path(directory) / "manifest.txt");
    if (!manifest) throw std::runtime_error("cannot write ensemble manifest in " + directory);
    manifest << "ensemble " << ensemble.size() << '\n';
    for (std::size_t k = 0; k < ensemble.size(); ++k) {
        const auto* member = dynamic_cast<const BaddrParams*>(ensemble.members[k].get());
        if (!member) throw std::invalid_argument("only network ensembles can be saved");
        const std::string name = "member_" + std::to_string(k) + ".txt";
        save_net_pair((fs::path(directory) / name).string(), member->nets());
        manifest << name << '\n';
    }
}

PriorEnsemble load_ensemble(const std::string& directory) {
    namespace fs = std::filesystem;
    std::ifstream manifest(fs::path(directory) / "manifest.txt");
    if (!manifest) throw std::runtime_error("cannot read ensemble manifest in " + directory);
    std::string tag;
    std::size_t count = 0;
    if (!(manifest >> tag >> count) || tag != "ensemble" || count == 0)
        throw std::runtime_error("malformed ensemble manifest in " + directory);
    PriorEnsemble out;
    for (std::size_t k = 0; k < count; ++k) {
        std::string name;
        if (!(manifest >> name)) throw std::runtime_error("ensemble manifest lists too few members");
        out.members.push_back(
            std::make_shared<const BaddrParams>(load_net_pair((fs::path(directory) / name).string())));
    }
    const auto& first = static_cast<const BaddrParams&>(*out.members.front()).nets();
    for (const auto& m : out.members) {
        const auto& n = static_cast<const BaddrParams&>(*m).nets();
        if (!(n.transition.shape() == first.transition.shape()) || !(n.observation.shape() == first.observation.shape()))
            throw std::runtime_error("ensemble members have different architectures");
    }
    return out;
}

}  // namespace baddr
