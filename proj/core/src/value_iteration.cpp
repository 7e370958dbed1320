#include "filterstab/value_iteration.hpp"

#include "filterstab/filter.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace filterstab {

BeliefPolicy::BeliefPolicy(BeliefGrid grid, double discount, std::vector<ActionIndex> actions,
                           std::vector<double> values, std::vector<double> residuals)
    : grid_(std::move(grid)), discount_(discount), actions_(std::move(actions)),
      values_(std::move(values)), residuals_(std::move(residuals)) {
    if (actions_.size() != grid_.size() || values_.size() != grid_.size())
        throw std::invalid_argument("BeliefPolicy: table size does not match the grid");
}

namespace {

struct Branch {
    double prob;
    std::uint32_t next;
};

// Successor structure of the grid-projected belief-MDP.
struct GridDynamics {
    std::size_t num_actions;
    std::vector<double> stage_cost;   // [i * U + u]
    std::vector<std::size_t> offsets; // branches of (i, u) are [offsets[k], offsets[k+1])
    std::vector<Branch> branches;
};

GridDynamics build_dynamics(const PomdpModel& model, const BeliefGrid& grid) {
    const std::size_t nx = model.num_states();
    const std::size_t nu = model.num_actions();
    GridDynamics dyn{nu, std::vector<double>(grid.size() * nu), {0}, {}};
    dyn.offsets.reserve(grid.size() * nu + 1);

    std::vector<double> pred(nx), post(nx);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Belief b = grid.point(i);
        for (ActionIndex u = 0; u < nu; ++u) {
            double c = 0.0;
            for (std::size_t x = 0; x < nx; ++x)
                c += model.cost()(x, u) * b[x];
            dyn.stage_cost[i * nu + u] = c;

            time_update_into(model, b.probs(), u, pred);
            for (ObsIndex y = 0; y < model.num_obs(); ++y) {
                post = pred;
                const double p = measurement_update_inplace(model, post, y);
                if (p == 0.0)
                    continue;
                dyn.branches.push_back({p, static_cast<std::uint32_t>(grid.project(post))});
            }
            dyn.offsets.push_back(dyn.branches.size());
        }
    }
    return dyn;
}

// Returns the minimizing action (lowest index on ties) and its Q-value.
std::pair<ActionIndex, double> backup(const GridDynamics& dyn, double beta,
                                      const std::vector<double>& v, std::size_t i) {
    ActionIndex best_u = 0;
    double best = std::numeric_limits<double>::infinity();
    for (ActionIndex u = 0; u < dyn.num_actions; ++u) {
        const std::size_t k = i * dyn.num_actions + u;
        double future = 0.0;
        for (std::size_t j = dyn.offsets[k]; j < dyn.offsets[k + 1]; ++j)
            future += dyn.branches[j].prob * v[dyn.branches[j].next];
        const double q = dyn.stage_cost[k] + beta * future;
        if (q < best) {
            best = q;
            best_u = u;
        }
    }
    return {best_u, best};
}

} // namespace

BeliefPolicy value_iteration_discounted(const PomdpModel& model, std::size_t resolution,
                                        const ValueIterationSettings& settings) {
    BeliefGrid grid(model.num_states(), resolution);
    const GridDynamics dyn = build_dynamics(model, grid);
    const double beta = model.discount();
    const std::size_t n = grid.size();

    std::vector<double> v(n, 0.0), next(n, 0.0);
    std::vector<double> residuals;
    bool converged = false;
    while (residuals.size() < settings.max_sweeps) {
        // Jacobi sweep; every point reads only the previous iterate.
        tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 256),
                          [&](const tbb::blocked_range<std::size_t>& range) {
                              for (std::size_t i = range.begin(); i != range.end(); ++i)
                                  next[i] = backup(dyn, beta, v, i).second;
                          });
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(next[i] - v[i]));
        residuals.push_back(residual);
        v.swap(next);
        if (residual < settings.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError(residuals.size(), residuals.empty() ? 0.0 : residuals.back());

    std::vector<ActionIndex> actions(n);
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = backup(dyn, beta, v, i).first;
    return BeliefPolicy(std::move(grid), beta, std::move(actions), std::move(v),
                        std::move(residuals));
}

double optimal_cost(const PomdpModel& model, const BeliefPolicy& policy,
                    std::span<const double> prior) {
    std::vector<double> post(prior.size());
    double total = 0.0;
    for (ObsIndex y = 0; y < model.num_obs(); ++y) {
        std::copy(prior.begin(), prior.end(), post.begin());
        const double p = measurement_update_inplace(model, post, y);
        if (p == 0.0)
            continue;
        total += p * policy.value_for(post);
    }
    return total;
}

double grid_slack(const BeliefPolicy& coarse, const BeliefPolicy& fine) {
    double slack = 0.0;
    for (std::size_t i = 0; i < coarse.grid().size(); ++i) {
        const Belief b = coarse.grid().point(i);
        slack = std::max(slack, std::abs(coarse.value_at(i) - fine.value_for(b.probs())));
    }
    return slack;
}

struct BeliefFeedbackPolicy::Shared {
    PomdpModel model;
    std::shared_ptr<const BeliefPolicy> table;
};

namespace {

class FeedbackController final : public Controller {
public:
    FeedbackController(std::shared_ptr<const void> owner, const PomdpModel& model,
                       const BeliefPolicy& table, std::vector<double> predictor)
        : owner_(std::move(owner)), model_(&model), table_(&table),
          predictor_(std::move(predictor)), filter_(predictor_.size()) {}

    ActionIndex act(ObsIndex y) override {
        filter_ = predictor_;
        if (measurement_update_inplace(*model_, filter_, y) == 0.0)
            throw ZeroLikelihood(y, time_);
        const ActionIndex u = table_->action_for(filter_);
        time_update_into(*model_, filter_, u, predictor_);
        ++time_;
        return u;
    }

    std::unique_ptr<Controller> clone() const override {
        return std::make_unique<FeedbackController>(*this);
    }

private:
    std::shared_ptr<const void> owner_;
    const PomdpModel* model_;
    const BeliefPolicy* table_;
    std::vector<double> predictor_;
    std::vector<double> filter_;
    std::size_t time_ = 0;
};

} // namespace

BeliefFeedbackPolicy::BeliefFeedbackPolicy(const PomdpModel& model,
                                           std::shared_ptr<const BeliefPolicy> table,
                                           const Belief& design_prior)
    : shared_(std::make_shared<const Shared>(Shared{model, std::move(table)})),
      design_prior_(design_prior.probs().begin(), design_prior.probs().end()) {
    if (!shared_->table)
        throw std::invalid_argument("BeliefFeedbackPolicy needs a policy table");
    if (design_prior.size() != model.num_states() ||
        shared_->table->grid().num_states() != model.num_states())
        throw std::invalid_argument("BeliefFeedbackPolicy: dimension mismatch");
}

std::unique_ptr<Controller> BeliefFeedbackPolicy::start() const {
    return std::make_unique<FeedbackController>(shared_, shared_->model, *shared_->table,
                                                design_prior_);
}

} // namespace filterstab
