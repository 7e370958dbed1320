#pragma once

#include "filterstab/belief.hpp"
#include "filterstab/evaluation.hpp"
#include "filterstab/model.hpp"
#include "filterstab/value_iteration.hpp"

#include <span>

namespace filterstab {

/// 2 ||c|| / (1 - beta) * ||mu - nu||_TV.
double bound_continuity_discounted(const PomdpModel& model, const Belief& mu, const Belief& nu);

/// 2 ||c|| * ||mu - nu||_TV.
double bound_continuity_average(const PomdpModel& model, const Belief& mu, const Belief& nu);

double bound_continuity(const PomdpModel& model, const Belief& mu, const Belief& nu,
                        Criterion criterion);

/// max - min of J*(prior) over `priors`, with J* read from a solved table.
/// For Criterion::average the table must be solved at a discount close to 1
/// and J*_avg is taken as (1 - beta) J*_beta. Only a lower estimate of the
/// supremum-based span, since it looks at finitely many priors.
double span_seminorm(const PomdpModel& model, const BeliefPolicy& solved, Criterion criterion,
                     std::span<const Belief> priors);

/// f(n) = beta^n (rho - 4 alpha^n), with 0^0 = 1.
double prior_independent_objective(double alpha, double beta, double rho, double n);

struct PriorIndependentBound {
    double trivial = 0.0;  ///< C = ||c|| / (1 - beta)
    double rho = 0.0;      ///< (C - span) / C
    double n_star = 0.0;   ///< closed-form maximizer; NaN when out of domain
    bool closed_form = false; ///< false when the exhaustive search was used
    std::size_t n = 0;     ///< integer step realizing the maximum of f
    double f_max = 0.0;
    double bound = 0.0;    ///< C (1 - f_max)
    double effective = 0.0; ///< min(bound, C)
    bool clamped = false;  ///< f_max < 0, so bound exceeded C
};

/// Bound on the discounted mismatch gap that holds for every pair of priors.
/// Needs 0 <= alpha < 1 and 0 < beta < 1. The closed-form maximizer is used
/// when rho > 0 and alpha > 0; otherwise n ranges over [0, n_max].
PriorIndependentBound bound_prior_independent(double alpha, double beta, double cost_sup,
                                              double span, std::size_t n_max = 200);

} // namespace filterstab
