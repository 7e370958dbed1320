#include "filterstab/bounds.hpp"

#include "filterstab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace filterstab {

double bound_continuity_discounted(const PomdpModel& model, const Belief& mu, const Belief& nu) {
    return 2.0 * model.cost_sup() / (1.0 - model.discount()) * tv_distance(mu, nu);
}

double bound_continuity_average(const PomdpModel& model, const Belief& mu, const Belief& nu) {
    return 2.0 * model.cost_sup() * tv_distance(mu, nu);
}

double bound_continuity(const PomdpModel& model, const Belief& mu, const Belief& nu,
                        Criterion criterion) {
    return criterion == Criterion::average ? bound_continuity_average(model, mu, nu)
                                           : bound_continuity_discounted(model, mu, nu);
}

double span_seminorm(const PomdpModel& model, const BeliefPolicy& solved, Criterion criterion,
                     std::span<const Belief> priors) {
    if (priors.empty())
        return 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Belief& prior : priors) {
        const double j = optimal_cost(model, solved, prior);
        lo = std::min(lo, j);
        hi = std::max(hi, j);
    }
    const double span = hi - lo;
    return criterion == Criterion::average ? (1.0 - solved.discount()) * span : span;
}

double prior_independent_objective(double alpha, double beta, double rho, double n) {
    const double alpha_n = n == 0.0 ? 1.0 : std::pow(alpha, n);
    return std::pow(beta, n) * (rho - 4.0 * alpha_n);
}

PriorIndependentBound bound_prior_independent(double alpha, double beta, double cost_sup,
                                              double span, std::size_t n_max) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("prior-independent bound needs 0 <= alpha < 1");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("prior-independent bound needs 0 < beta < 1");
    if (!(cost_sup >= 0.0) || !(span >= 0.0))
        throw std::invalid_argument("cost bound and span must be non-negative");

    PriorIndependentBound r;
    r.trivial = cost_sup / (1.0 - beta);
    r.n_star = std::numeric_limits<double>::quiet_NaN();
    if (r.trivial == 0.0)
        return r;
    r.rho = (r.trivial - span) / r.trivial;

    const auto f = [&](double n) { return prior_independent_objective(alpha, beta, r.rho, n); };
    if (r.rho > 0.0 && alpha > 0.0) {
        const double arg =
            (r.rho / 4.0) * (std::log(beta) / (std::log(alpha) + std::log(beta)));
        r.n_star = std::log(arg) / std::log(alpha);
        const double lo = std::floor(r.n_star);
        const double hi = std::ceil(r.n_star);
        r.closed_form = true;
        r.n = static_cast<std::size_t>(f(hi) > f(lo) ? hi : lo);
        r.f_max = f(static_cast<double>(r.n));
    } else {
        r.f_max = f(0.0);
        for (std::size_t n = 1; n <= n_max; ++n) {
            const double v = f(static_cast<double>(n));
            if (v > r.f_max) {
                r.f_max = v;
                r.n = n;
            }
        }
    }
    r.bound = r.trivial * (1.0 - r.f_max);
    r.clamped = r.f_max < 0.0;
    r.effective = std::min(r.bound, r.trivial);
    return r;
}

} // namespace filterstab
