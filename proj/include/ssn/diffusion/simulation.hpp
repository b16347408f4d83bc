#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ssn/core/ids.hpp"
#include "ssn/core/profile.hpp"
#include "ssn/core/social_graph.hpp"
#include "ssn/core/wig.hpp"
#include "ssn/diffusion/susceptibility.hpp"

namespace ssn {

// Dense member x topic likelihoods.
class LikelihoodMatrix {
public:
    LikelihoodMatrix() = default;
    LikelihoodMatrix(std::size_t members, std::size_t topics) : members_(members), topics_(topics), v_(members * topics) {}

    std::size_t members() const { return members_; }
    std::size_t topics() const { return topics_; }
    std::span<double> row(std::size_t i) { return {v_.data() + i * topics_, topics_}; }
    std::span<const double> row(std::size_t i) const { return {v_.data() + i * topics_, topics_}; }
    double& at(std::size_t i, std::size_t k) { return v_[i * topics_ + k]; }
    double at(std::size_t i, std::size_t k) const { return v_[i * topics_ + k]; }
    std::span<const double> values() const { return v_; }

    bool operator==(const LikelihoodMatrix&) const = default;

private:
    std::size_t members_ = 0;
    std::size_t topics_ = 0;
    std::vector<double> v_;
};

struct SimulationState {
    LikelihoodMatrix profiles;
    std::vector<double> source;  // L_s, one entry per topic
    long step = 0;

    WeightedInterestGraph to_wig(int year) const;
};

// Profiles as an `members x topics` state with the given source.
SimulationState make_state(std::span<const InterestProfile> profiles, const InterestProfile& source);

// One synchronous update of every member. Throws InputError for an infeasible
// config and DimensionMismatch when state, graph and config disagree.
SimulationState step(const SimulationState& state, const SusceptibilityConfig& config, const SocialGraph& graph,
                     unsigned jobs = 1);

// Explicit Euler for the continuous-time rates: each step uses x = v * dt.
// `duration` must be a whole number of steps to 1e-9 relative.
SimulationState integrate_continuous(const SimulationState& state, const SusceptibilityConfig& rates,
                                     const SocialGraph& graph, double duration, double dt, unsigned jobs = 1);

struct EquilibriumOptions {
    double tolerance = 1e-10;  // on max_i |(b M)_i - b_i| / max_i b_i
    long max_iterations = 1'000'000;
};

// Positive weights with b M = b for the step operator M of a trend-free
// system, normalized to sum 1 within every connected component.
struct EquilibriumWeights {
    std::vector<double> b;
    std::vector<std::uint32_t> component;  // per member
    std::uint32_t component_count = 0;
    double residual = 0.0;
    long iterations = 0;
};

// Lazy power iteration b <- (b + b M) / 2. Throws NumericalError with the
// residual after max_iterations.
EquilibriumWeights solve_equilibrium(const SusceptibilityConfig& config, const SocialGraph& graph,
                                     const EquilibriumOptions& options = {});

// Sum_i b_i L_i per topic, one row per component. Throws InputError when any
// x_is is nonzero.
std::vector<std::vector<double>> conserved_average(const SimulationState& state, const SusceptibilityConfig& config,
                                                   const EquilibriumWeights& weights);

// a_i = Sum_{j in N_i} x_ji.
double authority(MemberId member, const SusceptibilityConfig& config, const SocialGraph& graph);
std::vector<double> authorities(const SusceptibilityConfig& config, const SocialGraph& graph);

struct ConsensusResult {
    SimulationState state;
    long steps = 0;
    std::vector<std::vector<double>> consensus;  // per component
};

// Steps until max_i,k |L_i(k) - Lhat_c(i)(k)| < tol. Throws InputError with a
// trend term present, NumericalError past max_steps.
ConsensusResult relax_to_consensus(const SimulationState& state, const SusceptibilityConfig& config,
                                   const SocialGraph& graph, double tol, long max_steps = 10'000'000,
                                   unsigned jobs = 1);

}  // namespace ssn
