#include "filterstab/robustness.hpp"

#include "filterstab/filter.hpp"
#include "filterstab/metrics.hpp"
#include "filterstab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace filterstab {

namespace {

enum Column { kTransient, kStrategic, kApproximation, kTotal, kResidual, kColumns };

// One paired trajectory: nature starts from mu, the controller from its own
// design prior. Records partial sums and J* at the true predictor.
struct PathRecord {
    std::vector<double> partial; // partial[n] = sum_{i<n} beta^i c
    std::vector<double> value;   // value[n] = beta^n J*(pi_{n-})
    double total = 0.0;
};

PathRecord simulate(const PomdpModel& model, const Belief& mu, const BeliefFeedbackPolicy& policy,
                    const BeliefPolicy& table, std::size_t n_max, std::size_t horizon,
                    CounterRng rng) {
    PathRecord rec{std::vector<double>(n_max + 1), std::vector<double>(n_max + 1), 0.0};
    auto controller = policy.start();
    std::vector<double> predictor(mu.probs().begin(), mu.probs().end());
    std::vector<double> filter(predictor.size());
    std::size_t x = rng.categorical(mu.probs());
    double discount = 1.0;
    for (std::size_t t = 0; t < std::max(horizon, n_max + 1); ++t) {
        if (t <= n_max) {
            rec.partial[t] = rec.total;
            rec.value[t] = discount * optimal_cost(model, table, predictor);
        }
        const ObsIndex y = rng.categorical(model.observation().row(x));
        const ActionIndex u = controller->act(y);
        if (t < horizon)
            rec.total += discount * model.cost()(x, u);
        if (t < n_max) {
            filter = predictor;
            measurement_update_inplace(model, filter, y);
            time_update_into(model, filter, u, predictor);
        }
        x = rng.categorical(model.transition(u).row(x));
        discount *= model.discount();
    }
    return rec;
}

} // namespace

std::vector<CostDecomposition>
decomposition_trace(const PomdpModel& model, const Belief& mu, const Belief& nu,
                    std::shared_ptr<const BeliefPolicy> table, std::size_t n_max,
                    const MonteCarloCost& method) {
    require_absolutely_continuous(mu, nu);
    const std::size_t horizon = method.horizon > 0
                                    ? method.horizon
                                    : discounted_horizon(model, default_truncation_tolerance(model));
    const BeliefFeedbackPolicy mismatched(model, table, nu);
    const BeliefFeedbackPolicy matched(model, table, mu);
    const std::size_t width = kColumns * (n_max + 1);

    const auto moments =
        monte_carlo_moments(method.samples, width, [&](std::size_t i, std::span<double> out) {
            const auto a = simulate(model, mu, mismatched, *table, n_max, horizon,
                                    CounterRng(method.seed, i));
            const auto b = simulate(model, mu, matched, *table, n_max, horizon,
                                    CounterRng(method.seed, i));
            const double gap = a.total - b.total;
            for (std::size_t n = 0; n <= n_max; ++n) {
                double* row = out.data() + n * kColumns;
                row[kTransient] = a.partial[n] - b.partial[n];
                row[kStrategic] = a.value[n] - b.value[n];
                row[kApproximation] = (a.total - a.partial[n]) - a.value[n];
                row[kTotal] = row[kTransient] + row[kStrategic] + row[kApproximation];
                row[kResidual] = row[kTotal] - gap;
            }
        });

    std::vector<CostDecomposition> trace(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        const auto* m = moments.data() + n * kColumns;
        trace[n] = {n,
                    m[kTransient].estimate(),
                    m[kStrategic].estimate(),
                    m[kApproximation].estimate(),
                    m[kTotal].estimate(),
                    m[kResidual].estimate()};
    }
    return trace;
}

CostDecomposition cost_decomposition(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                     std::shared_ptr<const BeliefPolicy> table, std::size_t n,
                                     const MonteCarloCost& method) {
    return decomposition_trace(model, mu, nu, std::move(table), n, method).back();
}

PomdpModel solving_model(const PomdpModel& model, const RobustnessSettings& settings) {
    return settings.criterion == Criterion::average ? model.with_discount(settings.average_discount)
                                                    : model;
}

RobustnessReport robustness_gap(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                const RobustnessSettings& settings) {
    if (mu.size() != model.num_states() || nu.size() != model.num_states())
        throw std::invalid_argument("prior dimension does not match the model");
    require_absolutely_continuous(mu, nu);

    const bool average = settings.criterion == Criterion::average;
    const PomdpModel solved = solving_model(model, settings);
    auto table = std::make_shared<const BeliefPolicy>(
        value_iteration_discounted(solved, settings.grid_resolution, settings.value_iteration));

    RobustnessReport r;
    r.criterion = settings.criterion;
    r.tv = tv_distance(mu, nu);
    r.cost_sup = model.cost_sup();
    r.discount = solved.discount();
    r.samples = settings.samples;
    r.seed = settings.seed;
    r.value_iteration_sweeps = table->sweeps();

    if (settings.refined_resolution > 0) {
        const auto fine = value_iteration_discounted(solved, settings.refined_resolution,
                                                     settings.value_iteration);
        r.grid_slack = grid_slack(*table, fine);
        if (average)
            r.grid_slack *= 1.0 - solved.discount();
    }

    r.horizon = settings.horizon > 0 ? settings.horizon
                : average             ? 2000
                                      : discounted_horizon(solved, default_truncation_tolerance(solved));
    if (!average)
        r.truncation_bound = truncation_bound(solved, r.horizon);

    const BeliefFeedbackPolicy mismatched(solved, table, nu);
    const BeliefFeedbackPolicy matched(solved, table, mu);
    const PairedCost paired = compare_costs(solved, mu, mismatched, matched, settings.criterion,
                                            r.horizon, settings.samples, settings.seed);
    r.cost_mismatched = paired.first;
    r.cost_matched = paired.second;
    r.measured_gap = paired.difference;
    if (average)
        r.convergence_gap = std::abs(r.measured_gap.value - paired.half_horizon_difference.value);

    r.continuity_bound = bound_continuity(model, mu, nu, settings.criterion);
    r.contraction = contraction_report(model);
    const auto priors = table->grid().points();
    r.span_estimate = span_seminorm(solved, *table, settings.criterion, priors);
    if (!average && r.contraction.alpha < 1.0 && solved.discount() > 0.0)
        r.prior_independent = bound_prior_independent(r.contraction.alpha, solved.discount(),
                                                      model.cost_sup(), r.span_estimate);

    if (!average) {
        const std::size_t n_max = std::max(settings.decomposition_max, settings.decomposition_n);
        r.decomposition = decomposition_trace(solved, mu, nu, table, n_max,
                                              {r.horizon, settings.samples, settings.seed});
        r.decomposition_n = settings.decomposition_n;
    }
    return r;
}

} // namespace filterstab
