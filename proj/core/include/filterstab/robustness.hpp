#pragma once

#include "filterstab/bounds.hpp"
#include "filterstab/contraction.hpp"
#include "filterstab/evaluation.hpp"
#include "filterstab/value_iteration.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace filterstab {

struct RobustnessSettings {
    Criterion criterion = Criterion::discounted;
    std::size_t grid_resolution = 40;
    std::size_t refined_resolution = 80; ///< second grid for the slack estimate; 0 disables it
    ValueIterationSettings value_iteration;
    double average_discount = 0.999; ///< vanishing discount used to solve the average problem
    std::size_t horizon = 0;         ///< 0: truncation default (discounted) or 2000 (average)
    std::size_t samples = 20000;
    std::uint64_t seed = 1;
    std::size_t decomposition_n = 5;
    std::size_t decomposition_max = 20; ///< trace covers n = 0..decomposition_max
};

/// Split of the discounted mismatch gap at step n:
///   transient   = E^{mu,g_nu}[sum_{i<n} beta^i c] - E^{mu,g_mu}[sum_{i<n} beta^i c]
///   strategic   = beta^n (E^{mu,g_nu} J*(pi_{n-}) - E^{mu,g_mu} J*(pi_{n-}))
///   approximation = E^{mu,g_nu}[sum_{i>=n} beta^i c] - beta^n E^{mu,g_nu} J*(pi_{n-})
/// where pi_{n-} is the correctly initialized predictor and J* the grid value.
/// `residual` is the sum minus the measured gap; it only reflects how far the
/// grid policy is from optimal.
struct CostDecomposition {
    std::size_t n = 0;
    Estimate transient;
    Estimate strategic;
    Estimate approximation;
    Estimate total;
    Estimate residual;
};

/// Decomposition for n = 0..n_max from one paired simulation.
std::vector<CostDecomposition>
decomposition_trace(const PomdpModel& model, const Belief& mu, const Belief& nu,
                    std::shared_ptr<const BeliefPolicy> table, std::size_t n_max,
                    const MonteCarloCost& method);

CostDecomposition cost_decomposition(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                     std::shared_ptr<const BeliefPolicy> table, std::size_t n,
                                     const MonteCarloCost& method);

struct RobustnessReport {
    Criterion criterion = Criterion::discounted;
    double tv = 0.0;
    double cost_sup = 0.0;
    double discount = 0.0;        ///< beta used to solve (average_discount for average cost)
    Estimate cost_mismatched;     ///< J(mu, gamma^nu)
    Estimate cost_matched;        ///< J(mu, gamma^mu)
    Estimate measured_gap;        ///< paired difference of the two
    std::size_t horizon = 0;
    double truncation_bound = 0.0; ///< discounted only
    double convergence_gap = 0.0;  ///< average only: |T average - T/2 average| of the gap
    double grid_slack = 0.0;
    std::size_t value_iteration_sweeps = 0;
    double continuity_bound = 0.0;
    double span_estimate = 0.0;
    ContractionReport contraction;
    std::optional<PriorIndependentBound> prior_independent;
    std::vector<CostDecomposition> decomposition; ///< discounted only, n = 0..decomposition_max
    std::size_t decomposition_n = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Solves gamma^nu and gamma^mu on the same grid, measures the cost gap under
/// the true prior mu on common random numbers and attaches every applicable
/// bound. Requires mu << nu.
RobustnessReport robustness_gap(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                const RobustnessSettings& settings = {});

/// The model the control problem is solved on: `model` itself for the
/// discounted criterion, `model` at `average_discount` for the average one.
PomdpModel solving_model(const PomdpModel& model, const RobustnessSettings& settings);

} // namespace filterstab
