#include "filterstab/observability.hpp"

#include "filterstab/linprog.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace filterstab {

ChebyshevFit approximate_g(const PomdpModel& model, std::span<const double> f, double epsilon) {
    const std::size_t nx = model.num_states();
    const std::size_t ny = model.num_obs();
    if (f.size() != nx)
        throw std::invalid_argument("approximate_g: f must have one entry per state");
    for (double v : f)
        if (!std::isfinite(v))
            throw std::invalid_argument("approximate_g: f must be finite");

    // Variables: g+ (ny), g- (ny), t, upper slacks (nx), lower slacks (nx).
    const std::size_t t_col = 2 * ny;
    const std::size_t n = 2 * ny + 1 + 2 * nx;
    StandardFormLp lp{Matrix(2 * nx, n), std::vector<double>(2 * nx), std::vector<double>(n, 0.0)};
    lp.c[t_col] = 1.0;
    const Matrix& q = model.observation();
    for (std::size_t x = 0; x < nx; ++x) {
        // (Q g)[x] + t - s = f[x]
        for (std::size_t y = 0; y < ny; ++y) {
            lp.a(x, y) = q(x, y);
            lp.a(x, ny + y) = -q(x, y);
        }
        lp.a(x, t_col) = 1.0;
        lp.a(x, t_col + 1 + x) = -1.0;
        lp.b[x] = f[x];
        // -(Q g)[x] + t - s' = -f[x]
        const std::size_t r = nx + x;
        for (std::size_t y = 0; y < ny; ++y) {
            lp.a(r, y) = -q(x, y);
            lp.a(r, ny + y) = q(x, y);
        }
        lp.a(r, t_col) = 1.0;
        lp.a(r, t_col + 1 + nx + x) = -1.0;
        lp.b[r] = -f[x];
    }

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error("approximate_g: Chebyshev LP did not reach an optimum");

    ChebyshevFit fit;
    fit.g.resize(ny);
    for (std::size_t y = 0; y < ny; ++y) {
        fit.g[y] = sol.x[y] - sol.x[ny + y];
        fit.g_sup_norm = std::max(fit.g_sup_norm, std::abs(fit.g[y]));
    }
    for (std::size_t x = 0; x < nx; ++x) {
        double qg = 0.0;
        for (std::size_t y = 0; y < ny; ++y)
            qg += q(x, y) * fit.g[y];
        fit.residual = std::max(fit.residual, std::abs(f[x] - qg));
    }
    fit.success = fit.residual < epsilon;
    return fit;
}

ObservabilityReport observability_report(const PomdpModel& model) {
    const std::size_t nx = model.num_states();
    const std::size_t ny = model.num_obs();
    Eigen::MatrixXd q(nx, ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
            q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = model.observation()(x, y);

    ObservabilityReport report;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
    const auto& sv = svd.singularValues();
    const double threshold = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > threshold)
            ++report.rank_Q;
    report.observable = report.rank_Q == nx;

    std::vector<double> indicator(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        indicator[x] = 1.0;
        const ChebyshevFit fit = approximate_g(model, indicator, 1e-9);
        report.worst_residual = std::max(report.worst_residual, fit.residual);
        report.worst_g_sup_norm = std::max(report.worst_g_sup_norm, fit.g_sup_norm);
        indicator[x] = 0.0;
    }
    return report;
}

} // namespace filterstab
