#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "baddr/pomdp.hpp"

namespace baddr {

// ---------------------------------------------------------------------------
// Tiger

struct TigerParams {
    double hear_accuracy = 0.85;
    double r_listen = -1.0;
    double r_correct = 10.0;
    double r_wrong = -100.0;

    void validate() const;
};

namespace tiger {
inline constexpr int kLeft = 0;
inline constexpr int kRight = 1;

inline constexpr int kListen = 0;
inline constexpr int kOpenLeft = 1;
inline constexpr int kOpenRight = 2;

inline constexpr int kHearLeft = 0;
inline constexpr int kHearRight = 1;
inline constexpr int kNull = 2;
}  // namespace tiger

/// Classic tiger problem; opening a door ends the episode.
///
/// State: one feature {left, right} for the tiger's door.
/// Actions: listen, open_left, open_right.
/// Observations: hear_left, hear_right, null (after opening).
class TigerPomdp final : public Pomdp {
public:
    explicit TigerPomdp(TigerParams params = {}, int horizon = 30, double discount = 0.95);

    const TigerParams& params() const noexcept { return params_; }

    const PomdpSpec& spec() const override { return spec_; }
    FeatureValues sample_initial_state(RngStream& rng) const override;
    double reward(std::span<const int> state, int action, std::span<const int> next) const override;
    bool terminal(std::span<const int> state, int action, std::span<const int> next) const override;
    FeatureValues recovery_state(std::span<const int> state, int action, std::span<const int> observation,
                                 RngStream& rng) const override;

    void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                FeatureValues& observation) const override;
    double transition_probability(std::span<const int> state, int action, std::span<const int> next) const override;
    double observation_probability(std::span<const int> state, int action, std::span<const int> next,
                                   std::span<const int> observation) const override;

private:
    TigerParams params_;
    PomdpSpec spec_;
};

FeatureValues tiger_reset(RngStream& rng);
TransitionSample tiger_step(std::span<const int> state, int action, const TigerParams& params, RngStream& rng);

// ---------------------------------------------------------------------------
// Road racing

struct RoadRaceParams {
    int lanes = 3;
    int max_distance = 6;
    /// Per-lane probability that the car in that lane closes in by one.
    std::vector<double> advance_probs;
    double penalty = -1.0;

    /// p_i = (i + 1) / (n + 1).
    static RoadRaceParams with_lanes(int lanes, int max_distance = 6);
    void validate() const;
};

namespace road {
inline constexpr int kUp = 0;    // lane - 1
inline constexpr int kStay = 1;
inline constexpr int kDown = 2;  // lane + 1
}  // namespace road

/// Multi-lane overtaking problem.
///
/// State features: [agent_lane, car_0, ..., car_{n-1}] with car positions in
/// [0, l]. The single observation feature is the distance of the car in the
/// agent's lane, which is also the reward (plus the penalty on a failed move).
class RoadRacePomdp final : public Pomdp {
public:
    explicit RoadRacePomdp(RoadRaceParams params, int horizon = 20, double discount = 0.95);

    const RoadRaceParams& params() const noexcept { return params_; }

    const PomdpSpec& spec() const override { return spec_; }
    FeatureValues sample_initial_state(RngStream& rng) const override;
    double reward(std::span<const int> state, int action, std::span<const int> next) const override;
    bool terminal(std::span<const int> state, int action, std::span<const int> next) const override;
    FeatureValues recovery_state(std::span<const int> state, int action, std::span<const int> observation,
                                 RngStream& rng) const override;

    void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                FeatureValues& observation) const override;
    double transition_probability(std::span<const int> state, int action, std::span<const int> next) const override;
    double observation_probability(std::span<const int> state, int action, std::span<const int> next,
                                   std::span<const int> observation) const override;

    FeatureValues initial_state() const;

private:
    RoadRaceParams params_;
    PomdpSpec spec_;
};

FeatureValues roadrace_reset(const RoadRaceParams& params, RngStream& rng);
TransitionSample roadrace_step(std::span<const int> state, int action, const RoadRaceParams& params, RngStream& rng);

// ---------------------------------------------------------------------------
// Explicit tables, for toys and oracles.

/// POMDP over a single state feature and single observation feature with
/// dense tables. Indexing: transition[(s * A + a) * S + s'],
/// observation[((s * A + a) * S + s') * O + o], reward[(s * A + a) * S + s'].
struct TabularTables {
    int states = 0;
    int actions = 0;
    int observations = 0;
    std::vector<double> transition;
    std::vector<double> observation;
    std::vector<double> reward;
    std::vector<double> initial;
    /// Optional; empty means never terminal.
    std::vector<std::uint8_t> terminal;
};

class TabularPomdp final : public Pomdp {
public:
    TabularPomdp(TabularTables tables, int horizon, double discount);

    const TabularTables& tables() const noexcept { return tables_; }

    const PomdpSpec& spec() const override { return spec_; }
    FeatureValues sample_initial_state(RngStream& rng) const override;
    double reward(std::span<const int> state, int action, std::span<const int> next) const override;
    bool terminal(std::span<const int> state, int action, std::span<const int> next) const override;

    void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                FeatureValues& observation) const override;
    double transition_probability(std::span<const int> state, int action, std::span<const int> next) const override;
    double observation_probability(std::span<const int> state, int action, std::span<const int> next,
                                   std::span<const int> observation) const override;

private:
    TabularTables tables_;
    PomdpSpec spec_;
};

// ---------------------------------------------------------------------------
// Prior simulator samplers

/// Generative prior over simulators of one domain.
class PriorSimulatorSampler {
public:
    virtual ~PriorSimulatorSampler() = default;
    virtual std::shared_ptr<const Pomdp> sample(RngStream& rng) const = 0;
    /// The simulator whose uncertain parameters sit at their prior mean.
    virtual std::shared_ptr<const Pomdp> expected() const = 0;
};

inline std::shared_ptr<const Pomdp> sample_prior_simulator(const PriorSimulatorSampler& sampler, RngStream& rng) {
    return sampler.sample(rng);
}

/// hear_accuracy = 0.5 + 0.5 * X with X ~ Beta(k m', k (1 - m')),
/// m' = (mean - 0.5) / 0.5 and k the concentration. An infinite
/// concentration gives the degenerate law at `mean`.
class TigerPriorSampler final : public PriorSimulatorSampler {
public:
    TigerPriorSampler(TigerParams base, double mean, double concentration, int horizon, double discount);

    std::shared_ptr<const Pomdp> sample(RngStream& rng) const override;
    std::shared_ptr<const Pomdp> expected() const override;

    double sample_accuracy(RngStream& rng) const;

private:
    TigerParams base_;
    double mean_;
    double concentration_;
    int horizon_;
    double discount_;
};

/// Each lane's advance probability i.i.d. Uniform(0, 1); observation and
/// agent-motion models are exact.
class RoadRacePriorSampler final : public PriorSimulatorSampler {
public:
    RoadRacePriorSampler(RoadRaceParams base, int horizon, double discount);

    std::shared_ptr<const Pomdp> sample(RngStream& rng) const override;
    std::shared_ptr<const Pomdp> expected() const override;

private:
    RoadRaceParams base_;
    int horizon_;
    double discount_;
};

/// Degenerate law: always returns the same simulator.
class FixedSimulatorSampler final : public PriorSimulatorSampler {
public:
    explicit FixedSimulatorSampler(std::shared_ptr<const Pomdp> model) : model_(std::move(model)) {}
    std::shared_ptr<const Pomdp> sample(RngStream&) const override { return model_; }
    std::shared_ptr<const Pomdp> expected() const override { return model_; }

private:
    std::shared_ptr<const Pomdp> model_;
};

}  // namespace baddr
