#pragma once

#include "filterstab/belief.hpp"
#include "filterstab/filter.hpp"
#include "filterstab/model.hpp"
#include "filterstab/monte_carlo.hpp"
#include "filterstab/policy.hpp"
#include "filterstab/value_iteration.hpp"

#include <cstdint>
#include <memory>
#include <string_view>
#include <variant>

namespace filterstab {

enum class Criterion { discounted, average };

std::string_view to_string(Criterion criterion) noexcept;
/// Accepts "discounted" or "average"; throws ParseError otherwise.
Criterion parse_criterion(std::string_view text);

/// Exact expectation over every observation sequence of length `horizon`.
struct EnumerateCost {
    std::size_t horizon = 0; ///< 0 selects the default truncation horizon
    double limit = kDefaultEnumerationLimit; ///< budget on |Y|^horizon leaves
};

struct MonteCarloCost {
    std::size_t horizon = 0; ///< 0 selects the default truncation horizon
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

using CostMethod = std::variant<EnumerateCost, MonteCarloCost>;

/// Truncated discounted cost. The neglected tail is at most truncation_bound.
struct CostEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double truncation_bound = 0.0;
    std::size_t horizon = 0;
};

/// 1e-6 * ||c|| / (1 - beta).
double default_truncation_tolerance(const PomdpModel& model);

/// beta^H ||c|| / (1 - beta).
double truncation_bound(const PomdpModel& model, std::size_t horizon);

/// Smallest H >= 1 whose truncation bound is <= tolerance.
std::size_t discounted_horizon(const PomdpModel& model, double tolerance);

/// E^{mu,gamma} sum_{t<H} beta^t c(X_t, U_t) where nature's X_0 ~ mu and the
/// policy may carry its own (design) prior.
CostEstimate evaluate_cost_discounted(const PomdpModel& model, const Belief& mu,
                                      const Policy& policy, const CostMethod& method);

/// Same, for the feedback policy gamma^nu built from a solved table.
/// Requires mu << nu.
CostEstimate evaluate_cost_discounted(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                      std::shared_ptr<const BeliefPolicy> table,
                                      const CostMethod& method);

struct AverageCostEstimate {
    double value = 0.0; ///< (1/T) sum_{t<T} E c(X_t, U_t)
    double std_error = 0.0;
    double half_horizon_value = 0.0; ///< same average over the first T/2 steps
    double convergence_gap = 0.0;    ///< |value - half_horizon_value|
    std::size_t horizon = 0;
};

AverageCostEstimate evaluate_cost_average(const PomdpModel& model, const Belief& mu,
                                          const Policy& policy, std::size_t horizon,
                                          std::size_t samples, std::uint64_t seed);

/// Two policies evaluated on common random numbers: sample i uses the same
/// random stream for both, so `difference` has a paired standard error.
struct PairedCost {
    Estimate first;
    Estimate second;
    Estimate difference; ///< first - second
    /// Average criterion only: the difference averaged over the first T/2 steps.
    Estimate half_horizon_difference;
    std::size_t horizon = 0;
};

/// Criterion::discounted weighs step t by beta^t, Criterion::average by 1/T.
PairedCost compare_costs(const PomdpModel& model, const Belief& mu, const Policy& first,
                         const Policy& second, Criterion criterion, std::size_t horizon,
                         std::size_t samples, std::uint64_t seed);

} // namespace filterstab
