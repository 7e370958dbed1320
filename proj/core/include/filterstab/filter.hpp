#pragma once

#include "filterstab/belief.hpp"
#include "filterstab/model.hpp"
#include "filterstab/policy.hpp"

#include <map>
#include <span>
#include <vector>

namespace filterstab {

/// Default budget for exact enumerations, counted in joint paths.
inline constexpr double kDefaultEnumerationLimit = 1e7;

/// Bayes step: pi[x] proportional to Q(y|x) * predictor[x]. Throws
/// ZeroLikelihood when y is impossible under the predictor.
Belief measurement_update(const PomdpModel& model, const Belief& predictor, ObsIndex y);

/// Prediction step: out[x'] = sum_x T(x'|x,u) * filter[x], renormalized.
Belief time_update(const PomdpModel& model, const Belief& filter, ActionIndex u);

/// In-place variants for hot loops; `belief` must have |X| entries.
/// measurement_update_inplace returns the likelihood sum_x Q(y|x) belief[x]
/// and normalizes; on zero likelihood it returns 0 and leaves `belief` zeroed.
double measurement_update_inplace(const PomdpModel& model, std::span<double> belief, ObsIndex y);
void time_update_into(const PomdpModel& model, std::span<const double> filter, ActionIndex u,
                      std::span<double> out);

/// Predictor pi_{n-} and filter pi_n at time n.
struct FilterState {
    std::size_t time = 0;
    Belief predictor;
    Belief filter;
};

/// Runs the recursion from pi_{0-} = prior over observations y_0..y_n and
/// actions u_0..u_{n-1}. Throws ZeroLikelihood carrying the time index.
std::vector<FilterState> run_filter(const PomdpModel& model, const Belief& prior,
                                    std::span<const ObsIndex> observations,
                                    std::span<const ActionIndex> actions);

struct OracleEntry {
    double probability = 0.0;         ///< P^{mu,gamma}(Y_{0:n} = y_{0:n})
    std::vector<ActionIndex> actions; ///< u_0..u_{n-1} chosen by the policy
    Belief filter;                    ///< law of X_n given y_{0:n}
};

/// Brute-force evaluation of the strategic measure: for every observation
/// sequence y_{0:n} it sums mu(x_0) Q(y_0|x_0) prod T(x_{t+1}|x_t,u_t) Q(y_{t+1}|x_{t+1})
/// over all state paths. Independent of the recursive filter; only sequences
/// with positive probability are returned. Throws EnumerationLimitError when
/// |X|^{n+1} |Y|^{n+1} exceeds `limit`.
std::map<std::vector<ObsIndex>, OracleEntry>
enumeration_oracle(const PomdpModel& model, const Belief& prior, const Policy& policy,
                   std::size_t horizon, double limit = kDefaultEnumerationLimit);

} // namespace filterstab
