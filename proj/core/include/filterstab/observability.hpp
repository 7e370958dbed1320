#pragma once

#include "filterstab/model.hpp"

#include <span>
#include <vector>

namespace filterstab {

/// Best sup-norm fit of a state function f by observation functions pushed
/// through the channel, f ~ Q g.
struct ChebyshevFit {
    std::vector<double> g;    ///< one value per observation
    double residual = 0.0;    ///< ||f - Q g||_inf, recomputed from g
    double g_sup_norm = 0.0;  ///< ||g||_inf; large for ill-conditioned channels
    bool success = false;     ///< residual < epsilon
};

/// Solves min_g ||f - Q g||_inf as the linear program
///   minimize t  s.t.  -t <= f[x] - (Q g)[x] <= t  for all x.
ChebyshevFit approximate_g(const PomdpModel& model, std::span<const double> f, double epsilon);

struct ObservabilityReport {
    std::size_t rank_Q = 0;
    bool observable = false;     ///< rank_Q == |X|
    double worst_residual = 0.0; ///< max over coordinate indicators of the Chebyshev residual
    double worst_g_sup_norm = 0.0;
};

/// One-step observability on a finite space: {Q g} is the column space of Q,
/// so every f is approximable iff rank Q = |X|. Rank uses singular values
/// above 1e-10 times the largest one.
ObservabilityReport observability_report(const PomdpModel& model);

} // namespace filterstab
