#include "baddr/belief.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace baddr {

ParticleBelief::ParticleBelief(std::vector<AugmentedState> particles, BeliefMode mode)
    : particles_(std::move(particles)), mode_(mode) {
    if (particles_.empty()) throw std::invalid_argument("a belief needs at least one particle");
    weights_.assign(particles_.size(), 1.0 / static_cast<double>(particles_.size()));
    build_cumulative();
}

ParticleBelief::ParticleBelief(std::vector<AugmentedState> particles, std::vector<double> weights)
    : particles_(std::move(particles)), weights_(std::move(weights)), mode_(BeliefMode::weighted) {
    if (particles_.empty()) throw std::invalid_argument("a belief needs at least one particle");
    if (weights_.size() != particles_.size()) throw std::invalid_argument("one weight per particle required");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("weights must not all be zero");
    for (double& w : weights_) w /= total;
    build_cumulative();
}

void ParticleBelief::build_cumulative() {
    cumulative_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) cumulative_[i] = acc += weights_[i];
}

std::size_t ParticleBelief::sample_index(RngStream& rng) const {
    if (mode_ == BeliefMode::unweighted) return rng.uniform_index(particles_.size());
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= particles_.size()) i = particles_.size() - 1;
    while (weights_[i] == 0.0 && i > 0) --i;
    return i;
}

double ParticleBelief::effective_sample_size() const {
    double sq = 0.0;
    for (double w : weights_) sq += w * w;
    return 1.0 / sq;
}

void ParticleBelief::validate() const {
    if (particles_.empty()) throw std::logic_error("belief is empty");
    if (weights_.size() != particles_.size()) throw std::logic_error("weight count differs from particle count");
    double total = 0.0;
    for (double w : weights_) total += w;
    if (std::abs(total - 1.0) > 1e-9) throw std::logic_error("belief weights do not sum to one");
    if (mode_ == BeliefMode::unweighted) {
        const double u = 1.0 / static_cast<double>(weights_.size());
        for (double w : weights_)
            if (std::abs(w - u) > 1e-12) throw std::logic_error("unweighted belief with unequal weights");
    }
    for (const auto& p : particles_)
        if (!p.params) throw std::logic_error("particle without parameters");
}

ParticleBelief ParticleBelief::resampled(std::size_t count, BeliefMode mode, RngStream& rng) const {
    std::vector<AugmentedState> out;
    out.reserve(count);
    if (mode_ == BeliefMode::unweighted && count == particles_.size()) {
        out = particles_;
    } else {
        for (std::size_t i : systematic_resample(weights_, count, rng)) out.push_back(particles_[i]);
    }
    return ParticleBelief(std::move(out), mode);
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count, RngStream& rng) {
    if (count == 0) throw std::invalid_argument("resample count must be positive");
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("cannot resample from zero weights");
    std::vector<std::size_t> out;
    out.reserve(count);
    const double step = total / static_cast<double>(count);
    double target = rng.uniform() * step;
    std::size_t i = 0;
    double acc = weights[0];
    for (std::size_t k = 0; k < count; ++k) {
        while (i + 1 < weights.size() && (acc < target || weights[i] == 0.0)) acc += weights[++i];
        std::size_t j = i;
        while (weights[j] == 0.0 && j > 0) --j;
        out.push_back(j);
        target += step;
    }
    return out;
}

ParticleBelief initial_belief(const PriorEnsemble& ensemble, const Domain& domain, std::size_t n_particles,
                              RngStream& rng) {
    if (ensemble.members.empty()) throw std::invalid_argument("empty prior ensemble");
    if (n_particles == 0) throw std::invalid_argument("a belief needs at least one particle");
    std::vector<AugmentedState> particles;
    particles.reserve(n_particles);
    for (std::size_t i = 0; i < n_particles; ++i) {
        const ParamHandle& theta = ensemble.members[rng.uniform_index(ensemble.members.size())];
        particles.push_back(AugmentedState{domain.sample_initial_state(rng), theta});
    }
    return ParticleBelief(std::move(particles));
}

ParticleBelief reset_belief_states(const ParticleBelief& belief, const Domain& domain, RngStream& rng) {
    ParticleBelief out = belief;
    for (auto& p : out.particles()) p.state = domain.sample_initial_state(rng);
    return out;
}

namespace {

bool same_values(std::span<const int> a, std::span<const int> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

ParticleBelief rejection_update(const ParticleBelief& belief, int action, std::span<const int> observation,
                                std::size_t n, const GbaDynamics& dynamics, std::size_t max_attempts,
                                RngStream& rng) {
    if (n == 0) throw std::invalid_argument("rejection update needs n >= 1");
    std::vector<AugmentedState> accepted;
    accepted.reserve(n);
    FeatureValues next;
    FeatureValues simulated;
    std::size_t attempts = 0;
    while (accepted.size() < n) {
        if (attempts >= max_attempts)
            throw BeliefUpdateFailure("rejection sampling accepted " + std::to_string(accepted.size()) + " of " +
                                          std::to_string(n) + " particles in " + std::to_string(attempts) +
                                          " attempts",
                                      accepted.size());
        ++attempts;
        const AugmentedState& p = belief.particle(belief.sample_index(rng));
        dynamics.sample(*p.params, p.state, action, rng, next, simulated);
        if (!same_values(simulated, observation)) continue;
        accepted.push_back(AugmentedState{next, dynamics.update(p.params, p.state, action, next, observation, rng)});
    }
    return ParticleBelief(std::move(accepted));
}

ParticleBelief importance_update(const ParticleBelief& belief, int action, std::span<const int> observation,
                                 std::size_t resample_size, const GbaDynamics& dynamics, RngStream& rng) {
    if (resample_size == 0) throw std::invalid_argument("resample size must be positive");
    const std::size_t count = belief.size();
    std::vector<FeatureValues> nexts(count);
    std::vector<double> weights(count);
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const AugmentedState& p = belief.particle(i);
        dynamics.sample_next_state(*p.params, p.state, action, rng, nexts[i]);
        const double w = belief.weight(i) == 0.0
                             ? 0.0
                             : belief.weight(i) *
                                   dynamics.observation_likelihood(*p.params, p.state, action, nexts[i], observation, rng);
        weights[i] = w;
        total += w;
    }
    if (!(total > 0.0)) throw BeliefUpdateFailure("every importance weight is zero", 0);
    std::unordered_map<std::size_t, ParamHandle> updated;
    std::vector<AugmentedState> out;
    out.reserve(resample_size);
    for (std::size_t i : systematic_resample(weights, resample_size, rng)) {
        auto it = updated.find(i);
        if (it == updated.end()) {
            const AugmentedState& p = belief.particle(i);
            it = updated.emplace(i, dynamics.update(p.params, p.state, action, nexts[i], observation, rng)).first;
        }
        out.push_back(AugmentedState{nexts[i], it->second});
    }
    return ParticleBelief(std::move(out), BeliefMode::weighted);
}

ParticleBelief filtering_update(const ParticleBelief& belief, int action, std::span<const int> observation,
                                const GbaDynamics& dynamics, RngStream& rng) {
    if (belief.mode() != BeliefMode::weighted) throw std::invalid_argument("filtering update needs a weighted belief");
    std::vector<AugmentedState> particles = belief.particles();
    std::vector<double> weights(particles.size());
    double total = 0.0;
    FeatureValues next;
    for (std::size_t i = 0; i < particles.size(); ++i) {
        AugmentedState& p = particles[i];
        if (belief.weight(i) == 0.0) {
            weights[i] = 0.0;
            continue;
        }
        dynamics.sample_next_state(*p.params, p.state, action, rng, next);
        weights[i] = belief.weight(i) * dynamics.observation_likelihood(*p.params, p.state, action, next, observation, rng);
        p.state = next;
        total += weights[i];
    }
    if (!(total > 0.0)) throw BeliefUpdateFailure("every filtering weight is zero", 0);
    return ParticleBelief(std::move(particles), std::move(weights));
}

ProbeSummary belief_probe(const ParticleBelief& belief, const ProbeFunction& probe, int bins, double low,
                          double high) {
    if (bins < 1 || !(high > low)) throw std::invalid_argument("probe histogram needs bins >= 1 and high > low");
    ProbeSummary out;
    out.low = low;
    out.high = high;
    out.histogram.assign(static_cast<std::size_t>(bins), 0.0);
    for (std::size_t i = 0; i < belief.size(); ++i) {
        const double w = belief.weight(i);
        const double v = probe(belief.particle(i));
        out.mean += w * v;
        auto bin = static_cast<long>(std::floor((v - low) / (high - low) * bins));
        bin = std::clamp(bin, 0L, static_cast<long>(bins) - 1);
        out.histogram[static_cast<std::size_t>(bin)] += w;
    }
    return out;
}

ProbeSummary tiger_hear_probe(const ParticleBelief& belief, const GbaDynamics& dynamics, RngStream& rng, int bins) {
    std::unordered_map<const ModelParams*, double> cache;
    const int left[] = {tiger::kLeft};
    const int right[] = {tiger::kRight};
    const int hear_left[] = {tiger::kHearLeft};
    const int hear_right[] = {tiger::kHearRight};
    auto probe = [&](const AugmentedState& p) {
        const auto it = cache.find(p.params.get());
        if (it != cache.end()) return it->second;
        const double v =
            0.5 * (dynamics.observation_likelihood(*p.params, left, tiger::kListen, left, hear_left, rng) +
                   dynamics.observation_likelihood(*p.params, right, tiger::kListen, right, hear_right, rng));
        cache.emplace(p.params.get(), v);
        return v;
    };
    return belief_probe(belief, probe, bins, 0.0, 1.0);
}

}  // namespace baddr
