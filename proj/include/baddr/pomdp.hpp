#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "baddr/features.hpp"
#include "baddr/rng.hpp"

namespace baddr {

/// Raised when a caller breaks an interface contract (e.g. an agent emits an
/// action outside the action space).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct PomdpSpec {
    double discount = 0.95;
    int horizon = 1;
    int action_count = 1;
    FeatureSpace state_space;
    FeatureSpace observation_space;
    std::pair<double, double> reward_bounds{0.0, 0.0};

    /// Throws std::invalid_argument when the invariants do not hold.
    void validate() const;
};

struct TransitionSample {
    FeatureValues next_state;
    FeatureValues observation;
    double reward = 0.0;
    bool terminal = false;
};

/// The parts of a problem an agent is allowed to know: spaces, initial state
/// distribution, reward and terminal predicate. Dynamics are not included.
class Domain {
public:
    virtual ~Domain() = default;

    virtual const PomdpSpec& spec() const = 0;
    virtual FeatureValues sample_initial_state(RngStream& rng) const = 0;
    virtual double reward(std::span<const int> state, int action, std::span<const int> next) const = 0;
    virtual bool terminal(std::span<const int> state, int action, std::span<const int> next) const = 0;

    /// State consistent with `observation` after taking `action` in `state`;
    /// used to recover a belief that no particle could explain.
    virtual FeatureValues recovery_state(std::span<const int> state, int action,
                                         std::span<const int> observation, RngStream& rng) const;
};

/// A concrete dynamics model p(s', o | s, a).
class DynamicsModel {
public:
    virtual ~DynamicsModel() = default;
    virtual void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                        FeatureValues& observation) const = 0;
};

/// A fully specified POMDP: known parts plus exact dynamics.
class Pomdp : public Domain, public DynamicsModel {
public:
    virtual double transition_probability(std::span<const int> state, int action,
                                          std::span<const int> next) const = 0;
    virtual double observation_probability(std::span<const int> state, int action, std::span<const int> next,
                                           std::span<const int> observation) const = 0;

    /// Samples (s', o) and attaches the reward and terminal flag.
    TransitionSample step(std::span<const int> state, int action, RngStream& rng) const;
};

/// Σ_t discount^t · rewards[t].
double discounted_return(std::span<const double> rewards, double discount);

struct EpisodeResult {
    double discounted_return = 0.0;
    int steps = 0;
    std::vector<double> reward_trace;
    std::int64_t wall_millis = 0;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual void reset(RngStream& rng) = 0;
    virtual TransitionSample step(int action, RngStream& rng) = 0;
};

/// Environment backed by a Pomdp; keeps the hidden state.
class SimulatedEnvironment : public Environment {
public:
    explicit SimulatedEnvironment(std::shared_ptr<const Pomdp> model);

    void reset(RngStream& rng) override;
    TransitionSample step(int action, RngStream& rng) override;

    const FeatureValues& state() const noexcept { return state_; }
    const Pomdp& model() const noexcept { return *model_; }

private:
    std::shared_ptr<const Pomdp> model_;
    FeatureValues state_;
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual void begin_episode(RngStream& rng) = 0;
    /// `steps_left` is the number of decisions remaining in the episode.
    virtual int act(int steps_left, RngStream& rng) = 0;
    virtual void observe(int action, std::span<const int> observation, RngStream& rng) = 0;
};

/// Runs the act/observe loop for at most spec.horizon steps, stopping early
/// on a terminal transition. Throws ContractViolation on an invalid action.
EpisodeResult run_episode(Environment& env, Agent& agent, const PomdpSpec& spec, RngStream& rng);

}  // namespace baddr
