#pragma once

#include "filterstab/matrix.hpp"
#include "filterstab/model.hpp"

#include <vector>

namespace filterstab {

/// Dobrushin coefficient of a row-stochastic matrix:
///   min over row pairs (x, x') of sum_z min(K[x][z], K[x'][z]).
/// On a finite space the infimum over partitions is attained by singletons,
/// since min(a, b) + min(c, d) <= min(a + c, b + d) makes every coarsening
/// weakly larger. Lies in [0, 1]; a single-row kernel gives 1.
double dobrushin(const Matrix& kernel);

struct ContractionReport {
    std::vector<double> delta_T_per_action;
    double delta_T_inf = 1.0; ///< min over actions
    double delta_Q = 1.0;
    double alpha = 0.0; ///< (1 - delta_T_inf) * (2 - delta_Q)
    bool exponentially_stable = false; ///< alpha < 1
};

ContractionReport contraction_report(const PomdpModel& model);

/// 2 * alpha^n for n = 0..n_max.
std::vector<double> contraction_envelope(double alpha, std::size_t n_max);
std::vector<double> contraction_envelope(const PomdpModel& model, std::size_t n_max);

} // namespace filterstab
