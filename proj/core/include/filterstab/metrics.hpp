#pragma once

#include "filterstab/belief.hpp"
#include "filterstab/filter.hpp"
#include "filterstab/model.hpp"
#include "filterstab/monte_carlo.hpp"
#include "filterstab/policy.hpp"

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace filterstab {

/// sum_x |p[x] - q[x]|, in [0, 2]. Throws std::invalid_argument on length mismatch.
double tv_distance(std::span<const double> p, std::span<const double> q);
inline double tv_distance(const Belief& p, const Belief& q) { return tv_distance(p.probs(), q.probs()); }

/// D(p||q) in nats; +infinity when p is not absolutely continuous w.r.t. q.
double relative_entropy(std::span<const double> p, std::span<const double> q);
inline double relative_entropy(const Belief& p, const Belief& q) {
    return relative_entropy(p.probs(), q.probs());
}

/// Test functions for the weak-merging surrogate; each must satisfy |f| <= 1.
using TestFunctions = std::vector<std::vector<double>>;

/// Coordinate indicators plus the index map rescaled to [-1, 1]. On a finite
/// state space the indicators already span every function, so weak and total
/// variation merging coincide there.
TestFunctions default_test_functions(std::size_t num_states);

/// max_f |sum_x f(x) (p[x] - q[x])|; never exceeds tv_distance(p, q).
double weak_surrogate(std::span<const double> p, std::span<const double> q,
                      const TestFunctions& functions);

/// Exact summation over all observation sequences.
struct Enumerate {
    double limit = kDefaultEnumerationLimit; ///< budget on |Y|^{n+1} leaves
};

/// Seeded sampling of trajectories under P^{mu,gamma}.
struct MonteCarlo {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

using EstimationMethod = std::variant<Enumerate, MonteCarlo>;

/// Per-step statistics of the true (mu) and wrongly initialized (nu) filters.
struct StabilityPoint {
    std::size_t n = 0;
    Estimate tv;               ///< E^{mu,gamma} ||pi_n^mu - pi_n^nu||_TV
    Estimate relative_entropy; ///< E^{mu,gamma} D(pi_n^mu || pi_n^nu)
};

using StabilityTrace = std::vector<StabilityPoint>;

/// Statistics for n = 0..n_max, with the policy acting on the observations.
/// Requires mu << nu (throws AbsoluteContinuityError).
StabilityTrace filter_stability_trace(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                      const Policy& policy, std::size_t n_max,
                                      const EstimationMethod& method);

/// E^{mu,gamma} ||pi_n^mu - pi_n^nu||_TV; standard error is 0 for Enumerate.
Estimate expected_filter_tv(const PomdpModel& model, const Belief& mu, const Belief& nu,
                            const Policy& policy, std::size_t n, const EstimationMethod& method);

/// E^{mu,gamma} ||pi_{n-}^mu - pi_{n-}^nu||_TV by exact enumeration of the recursion.
double expected_predictor_tv(const PomdpModel& model, const Belief& mu, const Belief& nu,
                             const Policy& policy, std::size_t n,
                             double limit = kDefaultEnumerationLimit);

struct MartingaleCheck {
    double lhs = 0.0; ///< expected predictor TV under mu
    double rhs = 0.0; ///< E^nu |E^nu[dmu/dnu(X_0) | Y_{0:n-1}, X_n] - E^nu[dmu/dnu(X_0) | Y_{0:n-1}]|
    double gap = 0.0;
};

/// Both sides of the Radon-Nikodym representation of the expected predictor
/// distance. The right side is a joint enumeration of (x_0..x_n, y_0..y_{n-1})
/// under P^{nu,gamma} and shares no code with the filter recursion.
MartingaleCheck tv_martingale_identity_check(const PomdpModel& model, const Belief& mu,
                                             const Belief& nu, const Policy& policy, std::size_t n,
                                             double limit = kDefaultEnumerationLimit);

} // namespace filterstab
