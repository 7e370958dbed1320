#include "filterstab/linprog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace filterstab {

namespace {

constexpr double kPivotEps = 1e-11;

// Tableau with constraint rows 0..m-1, objective row m and rhs in the last column.
class Tableau {
public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_(m + 1, n + 1), basis_(m) {}

    double& at(std::size_t r, std::size_t c) { return t_(r, c); }
    double rhs(std::size_t r) const { return t_(r, n_); }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t row, std::size_t col) {
        const double p = t_(row, col);
        for (std::size_t c = 0; c <= n_; ++c)
            t_(row, c) /= p;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == row)
                continue;
            const double factor = t_(r, col);
            if (factor == 0.0)
                continue;
            for (std::size_t c = 0; c <= n_; ++c)
                t_(r, c) -= factor * t_(row, c);
        }
        basis_[row] = col;
    }

    /// Runs Bland's rule over columns [0, allowed). Returns false if unbounded.
    bool optimize(std::size_t allowed) {
        while (true) {
            std::size_t enter = allowed;
            for (std::size_t c = 0; c < allowed; ++c)
                if (t_(m_, c) < -kPivotEps) {
                    enter = c;
                    break;
                }
            if (enter == allowed)
                return true;
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double coef = t_(r, enter);
                if (coef <= kPivotEps)
                    continue;
                const double ratio = t_(r, n_) / coef;
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && leave < m_ && basis_[r] < basis_[leave])) {
                    best = ratio;
                    leave = r;
                }
            }
            if (leave == m_)
                return false;
            pivot(leave, enter);
        }
    }

    /// Sets the objective row to cost c and prices out the basic columns.
    void set_objective(const std::vector<double>& cost) {
        for (std::size_t c = 0; c <= n_; ++c)
            t_(m_, c) = c < cost.size() ? cost[c] : 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = t_(m_, basis_[r]);
            if (cb == 0.0)
                continue;
            for (std::size_t c = 0; c <= n_; ++c)
                t_(m_, c) -= cb * t_(r, c);
        }
    }

    double objective() const { return -t_(m_, n_); }

private:
    std::size_t m_, n_;
    Matrix t_;
    std::vector<std::size_t> basis_;
};

} // namespace

LpSolution solve_lp(const StandardFormLp& lp) {
    const std::size_t m = lp.a.rows();
    const std::size_t n = lp.a.cols();
    if (lp.b.size() != m || lp.c.size() != n)
        throw std::invalid_argument("solve_lp: dimension mismatch");

    // Columns: n structural variables followed by m artificials.
    Tableau tab(m, n + m);
    for (std::size_t r = 0; r < m; ++r) {
        const double sign = lp.b[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c)
            tab.at(r, c) = sign * lp.a(r, c);
        tab.at(r, n + r) = 1.0;
        tab.at(r, n + m) = sign * lp.b[r];
        tab.basis()[r] = n + r;
    }

    std::vector<double> phase1(n + m, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        phase1[n + r] = 1.0;
    tab.set_objective(phase1);
    tab.optimize(n + m);

    LpSolution out;
    double scale = 1.0;
    for (double v : lp.b)
        scale = std::max(scale, std::abs(v));
    if (tab.objective() > 1e-9 * scale)
        return out;

    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
        if (tab.basis()[r] < n)
            continue;
        for (std::size_t c = 0; c < n; ++c)
            if (std::abs(tab.at(r, c)) > kPivotEps) {
                tab.pivot(r, c);
                break;
            }
    }

    std::vector<double> phase2(n + m, 0.0);
    std::copy(lp.c.begin(), lp.c.end(), phase2.begin());
    tab.set_objective(phase2);
    if (!tab.optimize(n)) {
        out.status = LpStatus::unbounded;
        return out;
    }

    out.status = LpStatus::optimal;
    out.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (tab.basis()[r] < n)
            out.x[tab.basis()[r]] = tab.rhs(r);
    out.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c)
        out.objective += lp.c[c] * out.x[c];
    return out;
}

} // namespace filterstab
