#include <stdexcept>
#include <unordered_map>

#include "baddr/gba.hpp"

namespace baddr {

DirichletTable::DirichletTable(std::uint64_t states_, int actions_, std::uint64_t observations_,
                               std::vector<double> transition_, std::vector<double> observation_)
    : states(states_),
      actions(actions_),
      observations(observations_),
      transition(std::move(transition_)),
      observation(std::move(observation_)) {
    const std::uint64_t rows = states * static_cast<std::uint64_t>(actions);
    if (transition.size() != rows * states || observation.size() != rows * states * observations)
        throw std::invalid_argument("Dirichlet table sizes do not match the spaces");
    for (double c : transition)
        if (!(c > 0.0)) throw std::invalid_argument("Dirichlet counts must be strictly positive");
    for (double c : observation)
        if (!(c > 0.0)) throw std::invalid_argument("Dirichlet counts must be strictly positive");
    transition_totals.assign(rows, 0.0);
    for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t k = 0; k < states; ++k) transition_totals[r] += transition[r * states + k];
    observation_totals.assign(rows * states, 0.0);
    for (std::uint64_t r = 0; r < rows * states; ++r)
        for (std::uint64_t k = 0; k < observations; ++k) observation_totals[r] += observation[r * observations + k];
}

DirichletTable DirichletTable::from_model(const Pomdp& model, double strength, double floor) {
    const PomdpSpec& spec = model.spec();
    const std::uint64_t S = spec.state_space.joint_size();
    const std::uint64_t O = spec.observation_space.joint_size();
    const int A = spec.action_count;
    constexpr std::uint64_t kMaxEntries = 20'000'000;
    if (S * static_cast<std::uint64_t>(A) * S * O > kMaxEntries)
        throw std::invalid_argument("tabular Dirichlet prior would need more than 2e7 counts for this domain");
    std::vector<double> t(S * static_cast<std::uint64_t>(A) * S);
    std::vector<double> o(t.size() * O);
    for (std::uint64_t s = 0; s < S; ++s) {
        const FeatureValues sv = spec.state_space.unflatten(s);
        for (int a = 0; a < A; ++a) {
            for (std::uint64_t n = 0; n < S; ++n) {
                const FeatureValues nv = spec.state_space.unflatten(n);
                const std::uint64_t ti = (s * static_cast<std::uint64_t>(A) + static_cast<std::uint64_t>(a)) * S + n;
                t[ti] = strength * model.transition_probability(sv, a, nv) + floor;
                for (std::uint64_t k = 0; k < O; ++k) {
                    const FeatureValues ov = spec.observation_space.unflatten(k);
                    o[ti * O + k] = strength * model.observation_probability(sv, a, nv, ov) + floor;
                }
            }
        }
    }
    return DirichletTable(S, A, O, std::move(t), std::move(o));
}

DirichletParams::DirichletParams(std::shared_ptr<const DirichletTable> prior) : prior_(std::move(prior)) {
    if (!prior_) throw std::invalid_argument("Dirichlet params need a prior table");
}

double DirichletParams::lookup(const Delta& d, std::uint64_t key) {
    const auto it = d.find(key);
    return it == d.end() ? 0.0 : it->second;
}

double DirichletParams::transition_count(std::uint64_t s, int a, std::uint64_t s_next) const {
    const std::uint64_t k = prior_->transition_index(s, a, s_next);
    return prior_->transition[k] + lookup(transition_delta_, k);
}

double DirichletParams::transition_total(std::uint64_t s, int a) const {
    const std::uint64_t r = s * static_cast<std::uint64_t>(prior_->actions) + static_cast<std::uint64_t>(a);
    return prior_->transition_totals[r] + lookup(transition_total_delta_, r);
}

double DirichletParams::observation_count(std::uint64_t s, int a, std::uint64_t s_next, std::uint64_t o) const {
    const std::uint64_t k = prior_->observation_index(s, a, s_next, o);
    return prior_->observation[k] + lookup(observation_delta_, k);
}

double DirichletParams::observation_total(std::uint64_t s, int a, std::uint64_t s_next) const {
    const std::uint64_t r = prior_->transition_index(s, a, s_next);
    return prior_->observation_totals[r] + lookup(observation_total_delta_, r);
}

DirichletParams DirichletParams::incremented(std::uint64_t s, int a, std::uint64_t s_next, std::uint64_t o) const {
    DirichletParams out = *this;
    const std::uint64_t row = s * static_cast<std::uint64_t>(prior_->actions) + static_cast<std::uint64_t>(a);
    const std::uint64_t ti = prior_->transition_index(s, a, s_next);
    out.transition_delta_[ti] += 1.0;
    out.transition_total_delta_[row] += 1.0;
    out.observation_delta_[prior_->observation_index(s, a, s_next, o)] += 1.0;
    out.observation_total_delta_[ti] += 1.0;
    ++out.increments_;
    return out;
}

std::vector<double> dirichlet_predictive(const DirichletParams& d, std::uint64_t s, int a) {
    const std::uint64_t S = d.prior().states;
    const std::uint64_t O = d.prior().observations;
    std::vector<double> joint(S * O);
    const double t_total = d.transition_total(s, a);
    for (std::uint64_t n = 0; n < S; ++n) {
        const double p_next = d.transition_count(s, a, n) / t_total;
        const double o_total = d.observation_total(s, a, n);
        for (std::uint64_t o = 0; o < O; ++o) joint[n * O + o] = p_next * d.observation_count(s, a, n, o) / o_total;
    }
    return joint;
}

namespace {

std::uint64_t sample_next(const DirichletParams& d, std::uint64_t s, int a, RngStream& rng) {
    const std::uint64_t S = d.prior().states;
    double u = rng.uniform() * d.transition_total(s, a);
    for (std::uint64_t n = 0; n < S; ++n) {
        u -= d.transition_count(s, a, n);
        if (u < 0.0) return n;
    }
    return S - 1;
}

std::uint64_t sample_observation(const DirichletParams& d, std::uint64_t s, int a, std::uint64_t n, RngStream& rng) {
    const std::uint64_t O = d.prior().observations;
    double u = rng.uniform() * d.observation_total(s, a, n);
    for (std::uint64_t o = 0; o < O; ++o) {
        u -= d.observation_count(s, a, n, o);
        if (u < 0.0) return o;
    }
    return O - 1;
}

const DirichletParams& dirichlet_of(const ModelParams& params) {
    const auto* p = dynamic_cast<const DirichletParams*>(&params);
    if (!p) throw std::invalid_argument("DirichletDynamics needs DirichletParams");
    return *p;
}

// Root model using the current predictive (counts frozen).
class ExpectedDirichletModel final : public DynamicsModel {
public:
    ExpectedDirichletModel(ParamHandle handle, const PomdpSpec& spec)
        : handle_(std::move(handle)), params_(&static_cast<const DirichletParams&>(*handle_)), spec_(&spec) {}

    void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                FeatureValues& observation) const override {
        const std::uint64_t s = spec_->state_space.flat_index(state);
        const std::uint64_t n = sample_next(*params_, s, action, rng);
        const std::uint64_t o = sample_observation(*params_, s, action, n, rng);
        next = spec_->state_space.unflatten(n);
        observation = spec_->observation_space.unflatten(o);
    }

private:
    ParamHandle handle_;
    const DirichletParams* params_;
    const PomdpSpec* spec_;
};

// Root model drawing one categorical per visited row from its Dirichlet.
class SampledDirichletModel final : public DynamicsModel {
public:
    SampledDirichletModel(ParamHandle handle, const PomdpSpec& spec, RngStream rng)
        : handle_(std::move(handle)),
          params_(&static_cast<const DirichletParams&>(*handle_)),
          spec_(&spec),
          rng_(std::move(rng)) {}

    void sample(std::span<const int> state, int action, RngStream& rng, FeatureValues& next,
                FeatureValues& observation) const override {
        const DirichletTable& prior = params_->prior();
        const std::uint64_t s = spec_->state_space.flat_index(state);
        const std::uint64_t row = s * static_cast<std::uint64_t>(prior.actions) + static_cast<std::uint64_t>(action);
        auto& t_row = transition_rows_[row];
        if (t_row.empty()) {
            t_row.resize(prior.states);
            for (std::uint64_t k = 0; k < prior.states; ++k) t_row[k] = rng_.gamma(params_->transition_count(s, action, k));
        }
        const std::uint64_t n = rng.categorical(t_row);
        const std::uint64_t orow = prior.transition_index(s, action, n);
        auto& o_row = observation_rows_[orow];
        if (o_row.empty()) {
            o_row.resize(prior.observations);
            for (std::uint64_t k = 0; k < prior.observations; ++k)
                o_row[k] = rng_.gamma(params_->observation_count(s, action, n, k));
        }
        const std::uint64_t o = rng.categorical(o_row);
        next = spec_->state_space.unflatten(n);
        observation = spec_->observation_space.unflatten(o);
    }

private:
    ParamHandle handle_;
    const DirichletParams* params_;
    const PomdpSpec* spec_;
    mutable RngStream rng_;
    mutable std::unordered_map<std::uint64_t, std::vector<double>> transition_rows_;
    mutable std::unordered_map<std::uint64_t, std::vector<double>> observation_rows_;
};

}  // namespace

DirichletStep dirichlet_step(const DirichletParams& d, std::uint64_t s, int a, RngStream& rng) {
    const std::uint64_t n = sample_next(d, s, a, rng);
    const std::uint64_t o = sample_observation(d, s, a, n, rng);
    return DirichletStep{d.incremented(s, a, n, o), n, o};
}

DirichletDynamics::DirichletDynamics(std::shared_ptr<const Domain> domain, DirichletRootSampling root)
    : GbaDynamics(std::move(domain)), root_(root) {}

void DirichletDynamics::sample(const ModelParams& params, std::span<const int> state, int action, RngStream& rng,
                               FeatureValues& next, FeatureValues& observation) const {
    const DirichletParams& d = dirichlet_of(params);
    const std::uint64_t s = spec().state_space.flat_index(state);
    const std::uint64_t n = sample_next(d, s, action, rng);
    const std::uint64_t o = sample_observation(d, s, action, n, rng);
    next = spec().state_space.unflatten(n);
    observation = spec().observation_space.unflatten(o);
}

void DirichletDynamics::sample_next_state(const ModelParams& params, std::span<const int> state, int action,
                                          RngStream& rng, FeatureValues& next) const {
    const DirichletParams& d = dirichlet_of(params);
    next = spec().state_space.unflatten(sample_next(d, spec().state_space.flat_index(state), action, rng));
}

double DirichletDynamics::observation_likelihood(const ModelParams& params, std::span<const int> state, int action,
                                                 std::span<const int> next, std::span<const int> observation,
                                                 RngStream&) const {
    const DirichletParams& d = dirichlet_of(params);
    const std::uint64_t s = spec().state_space.flat_index(state);
    const std::uint64_t n = spec().state_space.flat_index(next);
    const std::uint64_t o = spec().observation_space.flat_index(observation);
    return d.observation_count(s, action, n, o) / d.observation_total(s, action, n);
}

double DirichletDynamics::likelihood(const ModelParams& params, std::span<const int> state, int action,
                                     std::span<const int> next, std::span<const int> observation,
                                     RngStream& rng) const {
    const DirichletParams& d = dirichlet_of(params);
    const std::uint64_t s = spec().state_space.flat_index(state);
    const std::uint64_t n = spec().state_space.flat_index(next);
    return d.transition_count(s, action, n) / d.transition_total(s, action) *
           observation_likelihood(params, state, action, next, observation, rng);
}

ParamHandle DirichletDynamics::update(const ParamHandle& params, std::span<const int> state, int action,
                                      std::span<const int> next, std::span<const int> observation, RngStream&) const {
    const DirichletParams& d = dirichlet_of(*params);
    return std::make_shared<const DirichletParams>(d.incremented(spec().state_space.flat_index(state), action,
                                                                 spec().state_space.flat_index(next),
                                                                 spec().observation_space.flat_index(observation)));
}

std::unique_ptr<DynamicsModel> DirichletDynamics::root_sample(const ParamHandle& params, RngStream& rng) const {
    dirichlet_of(*params);
    if (root_ == DirichletRootSampling::expected) return std::make_unique<ExpectedDirichletModel>(params, spec());
    return std::make_unique<SampledDirichletModel>(params, spec(), rng.split(rng.next_u64()));
}

}  // namespace baddr
