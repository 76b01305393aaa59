#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "baddr/gba.hpp"

namespace baddr {

enum class BeliefMode { unweighted, weighted };

/// Particle approximation of p(s, θ | h).
class ParticleBelief {
public:
    /// Uniform weights in the given mode.
    ParticleBelief(std::vector<AugmentedState> particles, BeliefMode mode = BeliefMode::unweighted);
    /// Weighted mode; weights are normalized here and must not all be zero.
    ParticleBelief(std::vector<AugmentedState> particles, std::vector<double> weights);

    std::size_t size() const noexcept { return particles_.size(); }
    BeliefMode mode() const noexcept { return mode_; }
    const std::vector<AugmentedState>& particles() const noexcept { return particles_; }
    std::vector<AugmentedState>& particles() noexcept { return particles_; }
    const AugmentedState& particle(std::size_t i) const { return particles_[i]; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }

    std::size_t sample_index(RngStream& rng) const;
    double effective_sample_size() const;

    /// Throws std::logic_error when the invariants are broken.
    void validate() const;

    /// Systematic resample to `count` equally weighted particles.
    ParticleBelief resampled(std::size_t count, BeliefMode mode, RngStream& rng) const;

private:
    void build_cumulative();

    std::vector<AugmentedState> particles_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    BeliefMode mode_;
};

/// Low-variance resampling: `count` indices from normalized `weights`.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count, RngStream& rng);

class BeliefUpdateFailure : public std::runtime_error {
public:
    BeliefUpdateFailure(const std::string& what, std::size_t accepted)
        : std::runtime_error(what), accepted_(accepted) {}
    std::size_t accepted() const noexcept { return accepted_; }

private:
    std::size_t accepted_;
};

/// Unweighted: n particles from the prior ensemble (uniform members) paired
/// with initial states of the domain.
ParticleBelief initial_belief(const PriorEnsemble& ensemble, const Domain& domain, std::size_t n_particles,
                              RngStream& rng);

/// Keeps every θ and weight, redraws every domain state from the initial distribution.
ParticleBelief reset_belief_states(const ParticleBelief& belief, const Domain& domain, RngStream& rng);

/// Simulate proposals from b, keep those whose simulated observation equals o.
ParticleBelief rejection_update(const ParticleBelief& belief, int action, std::span<const int> observation,
                                std::size_t n, const GbaDynamics& dynamics, std::size_t max_attempts,
                                RngStream& rng);

/// Propagate every particle, weight by p(o | θ, s, a, s'), resample to
/// `resample_size` and update θ on the survivors.
ParticleBelief importance_update(const ParticleBelief& belief, int action, std::span<const int> observation,
                                 std::size_t resample_size, const GbaDynamics& dynamics, RngStream& rng);

/// Like importance_update but θ' = θ and no resampling.
ParticleBelief filtering_update(const ParticleBelief& belief, int action, std::span<const int> observation,
                                const GbaDynamics& dynamics, RngStream& rng);

struct ProbeSummary {
    double mean = 0.0;
    double low = 0.0;
    double high = 1.0;
    /// Weight mass per equal-width bin over [low, high]; values outside are clamped.
    std::vector<double> histogram;
};

using ProbeFunction = std::function<double(const AugmentedState&)>;

ProbeSummary belief_probe(const ParticleBelief& belief, const ProbeFunction& probe, int bins = 20, double low = 0.0,
                          double high = 1.0);

/// Tiger P(hear correct | θ): observation likelihood of hearing the tiger's
/// side after listening, averaged over both doors. Values are cached per handle.
ProbeSummary tiger_hear_probe(const ParticleBelief& belief, const GbaDynamics& dynamics, RngStream& rng,
                              int bins = 20);

}  // namespace baddr
