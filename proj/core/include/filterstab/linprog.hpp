#pragma once

#include "filterstab/matrix.hpp"

#include <vector>

namespace filterstab {

/// minimize c'x subject to A x = b, x >= 0.
struct StandardFormLp {
    Matrix a;
    std::vector<double> b;
    std::vector<double> c;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

/// Dense two-phase tableau simplex with Bland's rule. Meant for the handful of
/// variables that appear in finite-channel approximation problems.
LpSolution solve_lp(const StandardFormLp& lp);

} // namespace filterstab
