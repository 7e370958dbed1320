#include "filterstab/errors.hpp"

#include <sstream>

namespace filterstab {

namespace {

std::string join_violations(const std::vector<Violation>& violations) {
    std::ostringstream os;
    os << "invalid model (" << violations.size() << " violation"
       << (violations.size() == 1 ? "" : "s") << ")";
    for (const auto& v : violations)
        os << "\n  " << v.to_string();
    return os.str();
}

} // namespace

ModelError::ModelError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

ZeroLikelihood::ZeroLikelihood(std::size_t observation, std::optional<std::size_t> time)
    : Error("observation " + std::to_string(observation) + " has zero likelihood" +
            (time ? " at time " + std::to_string(*time) : std::string())),
      observation_(observation), time_(time) {}

AbsoluteContinuityError::AbsoluteContinuityError(std::size_t state)
    : Error("mu is not absolutely continuous w.r.t. nu: nu[" + std::to_string(state) +
            "] = 0 but mu[" + std::to_string(state) + "] > 0"),
      state_(state) {}

EnumerationLimitError::EnumerationLimitError(double required, double limit)
    : Error([&] {
          std::ostringstream os;
          os << "enumeration needs " << required << " paths, limit is " << limit;
          return os.str();
      }()),
      required_(required), limit_(limit) {}

ConvergenceError::ConvergenceError(std::size_t sweeps, double residual)
    : Error([&] {
          std::ostringstream os;
          os << "value iteration did not converge after " << sweeps
             << " sweeps (residual " << residual << ")";
          return os.str();
      }()),
      sweeps_(sweeps), residual_(residual) {}

} // namespace filterstab
