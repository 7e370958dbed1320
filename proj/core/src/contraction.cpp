#include "filterstab/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace filterstab {

double dobrushin(const Matrix& kernel) {
    if (kernel.rows() == 0 || kernel.cols() == 0)
        throw std::invalid_argument("dobrushin: empty kernel");
    for (std::size_t r = 0; r < kernel.rows(); ++r) {
        double total = 0.0;
        for (double v : kernel.row(r)) {
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("dobrushin: kernel has a negative entry");
            total += v;
        }
        if (std::abs(total - 1.0) > kStochasticTolerance)
            throw std::invalid_argument("dobrushin: kernel row " + std::to_string(r) +
                                        " is not stochastic");
    }

    double best = 1.0;
    for (std::size_t a = 0; a < kernel.rows(); ++a)
        for (std::size_t b = a + 1; b < kernel.rows(); ++b) {
            double overlap = 0.0;
            const auto ra = kernel.row(a);
            const auto rb = kernel.row(b);
            for (std::size_t z = 0; z < kernel.cols(); ++z)
                overlap += std::min(ra[z], rb[z]);
            best = std::min(best, overlap);
        }
    return std::clamp(best, 0.0, 1.0);
}

ContractionReport contraction_report(const PomdpModel& model) {
    ContractionReport r;
    for (ActionIndex u = 0; u < model.num_actions(); ++u)
        r.delta_T_per_action.push_back(dobrushin(model.transition(u)));
    r.delta_T_inf = *std::min_element(r.delta_T_per_action.begin(), r.delta_T_per_action.end());
    r.delta_Q = dobrushin(model.observation());
    r.alpha = (1.0 - r.delta_T_inf) * (2.0 - r.delta_Q);
    r.exponentially_stable = r.alpha < 1.0;
    return r;
}

std::vector<double> contraction_envelope(double alpha, std::size_t n_max) {
    if (!(alpha >= 0.0) || alpha > 2.0)
        throw std::invalid_argument("contraction_envelope: alpha must lie in [0, 2]");
    std::vector<double> out(n_max + 1);
    double power = 1.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        out[n] = 2.0 * power;
        power *= alpha;
    }
    return out;
}

std::vector<double> contraction_envelope(const PomdpModel& model, std::size_t n_max) {
    return contraction_envelope(contraction_report(model).alpha, n_max);
}

} // namespace filterstab
