#pragma once

#include "filterstab/grid.hpp"
#include "filterstab/model.hpp"
#include "filterstab/policy.hpp"

#include <memory>
#include <span>
#include <vector>

namespace filterstab {

struct ValueIterationSettings {
    double tolerance = 1e-9;          ///< stop when the sup-norm change drops below this
    std::size_t max_sweeps = 100000;
};

/// Stationary policy on the belief-MDP, tabulated on a grid. The belief-MDP
/// state is the current filter pi_n (after seeing y_n, before acting), so
/// value_at(i) approximates the optimal cost-to-go from filter grid point i.
class BeliefPolicy {
public:
    BeliefPolicy(BeliefGrid grid, double discount, std::vector<ActionIndex> actions,
                 std::vector<double> values, std::vector<double> residuals);

    const BeliefGrid& grid() const noexcept { return grid_; }
    double discount() const noexcept { return discount_; }

    ActionIndex action_at(std::size_t index) const { return actions_.at(index); }
    double value_at(std::size_t index) const { return values_.at(index); }
    std::span<const ActionIndex> actions() const noexcept { return actions_; }
    std::span<const double> values() const noexcept { return values_; }

    ActionIndex action_for(std::span<const double> filter) const {
        return actions_[grid_.project(filter)];
    }
    double value_for(std::span<const double> filter) const { return values_[grid_.project(filter)]; }

    /// Sup-norm change of every sweep, in order.
    const std::vector<double>& residuals() const noexcept { return residuals_; }
    std::size_t sweeps() const noexcept { return residuals_.size(); }

private:
    BeliefGrid grid_;
    double discount_;
    std::vector<ActionIndex> actions_;
    std::vector<double> values_;
    std::vector<double> residuals_;
};

/// Value iteration on the grid-projected belief-MDP:
///   V(b) = min_u [ sum_x c(x,u) b[x] + beta sum_y P(y|b,u) V(project(update(b,u,y))) ]
/// with update = measurement update after time update. Observations with zero
/// probability are skipped; greedy actions break ties towards the lowest
/// index. Throws ConvergenceError after max_sweeps.
BeliefPolicy value_iteration_discounted(const PomdpModel& model, std::size_t resolution,
                                        const ValueIterationSettings& settings = {});

/// J*(prior) read off the grid: the first observation turns the prior into a
/// filter, so J*(prior) = sum_y P(y|prior) V(project(filter(prior, y))).
double optimal_cost(const PomdpModel& model, const BeliefPolicy& policy,
                    std::span<const double> prior);
inline double optimal_cost(const PomdpModel& model, const BeliefPolicy& policy, const Belief& prior) {
    return optimal_cost(model, policy, prior.probs());
}

/// max over coarse grid points of |V_coarse - V_fine| at the same belief.
double grid_slack(const BeliefPolicy& coarse, const BeliefPolicy& fine);

/// The decision maker's policy gamma^design: run the filter from
/// `design_prior` on the realized observations and act by the tabulated rule.
class BeliefFeedbackPolicy final : public Policy {
public:
    BeliefFeedbackPolicy(const PomdpModel& model, std::shared_ptr<const BeliefPolicy> table,
                         const Belief& design_prior);

    std::unique_ptr<Controller> start() const override;

private:
    struct Shared;
    std::shared_ptr<const Shared> shared_;
    std::vector<double> design_prior_;
};

} // namespace filterstab
