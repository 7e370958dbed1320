#include "filterstab/evaluation.hpp"

#include "filterstab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace filterstab {

std::string_view to_string(Criterion criterion) noexcept {
    return criterion == Criterion::average ? "average" : "discounted";
}

Criterion parse_criterion(std::string_view text) {
    if (text == "discounted")
        return Criterion::discounted;
    if (text == "average")
        return Criterion::average;
    throw ParseError("unknown criterion \"" + std::string(text) +
                     "\" (expected discounted or average)");
}

double default_truncation_tolerance(const PomdpModel& model) {
    return 1e-6 * model.cost_sup() / (1.0 - model.discount());
}

double truncation_bound(const PomdpModel& model, std::size_t horizon) {
    return std::pow(model.discount(), static_cast<double>(horizon)) * model.cost_sup() /
           (1.0 - model.discount());
}

std::size_t discounted_horizon(const PomdpModel& model, double tolerance) {
    if (!(tolerance > 0.0))
        throw std::invalid_argument("truncation tolerance must be positive");
    std::size_t h = 1;
    while (truncation_bound(model, h) > tolerance)
        ++h;
    return h;
}

namespace {

std::size_t resolve_horizon(const PomdpModel& model, std::size_t horizon) {
    return horizon > 0 ? horizon : discounted_horizon(model, default_truncation_tolerance(model));
}

// Weighted path cost sum_t w_t c(X_t, U_t) along one sampled trajectory.
double sample_path_cost(const PomdpModel& model, const Belief& mu, const Policy& policy,
                        std::span<const double> weights, CounterRng rng,
                        std::size_t split = 0, double* before_split = nullptr) {
    auto controller = policy.start();
    std::size_t x = rng.categorical(mu.probs());
    double total = 0.0;
    for (std::size_t t = 0; t < weights.size(); ++t) {
        const ObsIndex y = rng.categorical(model.observation().row(x));
        const ActionIndex u = controller->act(y);
        total += weights[t] * model.cost()(x, u);
        if (before_split != nullptr && t + 1 == split)
            *before_split = total;
        x = rng.categorical(model.transition(u).row(x));
    }
    return total;
}

std::vector<double> step_weights(const PomdpModel& model, Criterion criterion, std::size_t horizon) {
    std::vector<double> w(horizon);
    double discount = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (criterion == Criterion::average) {
            w[t] = 1.0 / static_cast<double>(horizon);
        } else {
            w[t] = discount;
            discount *= model.discount();
        }
    }
    return w;
}

void require_dimensions(const PomdpModel& model, const Belief& mu) {
    if (mu.size() != model.num_states())
        throw std::invalid_argument("prior has " + std::to_string(mu.size()) +
                                    " entries, model has " +
                                    std::to_string(model.num_states()) + " states");
}

struct CostTree {
    const PomdpModel& model;
    std::vector<double> discounts;
    double total = 0.0;

    // joint[x] = P(X_t = x, Y_{0:t-1} = observed prefix).
    void expand(std::size_t t, const std::vector<double>& joint, const Controller& controller) {
        if (t == discounts.size())
            return;
        const std::size_t nx = model.num_states();
        std::vector<double> weighted(nx), next(nx);
        for (ObsIndex y = 0; y < model.num_obs(); ++y) {
            double p = 0.0;
            for (std::size_t x = 0; x < nx; ++x) {
                weighted[x] = joint[x] * model.observation()(x, y);
                p += weighted[x];
            }
            if (p == 0.0)
                continue;
            auto branch = controller.clone();
            const ActionIndex u = branch->act(y);
            const Matrix& tr = model.transition(u);
            std::fill(next.begin(), next.end(), 0.0);
            double stage = 0.0;
            for (std::size_t x = 0; x < nx; ++x) {
                stage += weighted[x] * model.cost()(x, u);
                for (std::size_t z = 0; z < nx; ++z)
                    next[z] += weighted[x] * tr(x, z);
            }
            total += discounts[t] * stage;
            expand(t + 1, next, *branch);
        }
    }
};

} // namespace

CostEstimate evaluate_cost_discounted(const PomdpModel& model, const Belief& mu,
                                      const Policy& policy, const CostMethod& method) {
    require_dimensions(model, mu);
    if (const auto* e = std::get_if<EnumerateCost>(&method)) {
        const std::size_t h = resolve_horizon(model, e->horizon);
        const double leaves = std::pow(static_cast<double>(model.num_obs()), static_cast<double>(h));
        if (leaves > e->limit)
            throw EnumerationLimitError(leaves, e->limit);
        CostTree tree{model, step_weights(model, Criterion::discounted, h)};
        tree.expand(0, std::vector<double>(mu.probs().begin(), mu.probs().end()), *policy.start());
        return {tree.total, 0.0, truncation_bound(model, h), h};
    }
    const auto& mc = std::get<MonteCarloCost>(method);
    const std::size_t h = resolve_horizon(model, mc.horizon);
    const auto weights = step_weights(model, Criterion::discounted, h);
    const auto moments =
        monte_carlo_moments(mc.samples, 1, [&](std::size_t i, std::span<double> out) {
            out[0] = sample_path_cost(model, mu, policy, weights, CounterRng(mc.seed, i));
        });
    return {moments[0].mean(), moments[0].std_error(), truncation_bound(model, h), h};
}

CostEstimate evaluate_cost_discounted(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                      std::shared_ptr<const BeliefPolicy> table,
                                      const CostMethod& method) {
    require_absolutely_continuous(mu, nu);
    return evaluate_cost_discounted(model, mu, BeliefFeedbackPolicy(model, std::move(table), nu),
                                    method);
}

AverageCostEstimate evaluate_cost_average(const PomdpModel& model, const Belief& mu,
                                          const Policy& policy, std::size_t horizon,
                                          std::size_t samples, std::uint64_t seed) {
    require_dimensions(model, mu);
    if (horizon < 2)
        throw std::invalid_argument("average-cost horizon must be at least 2");
    const std::size_t half = horizon / 2;
    const auto moments = monte_carlo_moments(samples, 2, [&](std::size_t i, std::span<double> out) {
        CounterRng rng(seed, i);
        auto controller = policy.start();
        std::size_t x = rng.categorical(mu.probs());
        double first = 0.0, total = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) {
            const ObsIndex y = rng.categorical(model.observation().row(x));
            const ActionIndex u = controller->act(y);
            total += model.cost()(x, u);
            if (t + 1 == half)
                first = total;
            x = rng.categorical(model.transition(u).row(x));
        }
        out[0] = total / static_cast<double>(horizon);
        out[1] = first / static_cast<double>(half);
    });
    AverageCostEstimate result;
    result.value = moments[0].mean();
    result.std_error = moments[0].std_error();
    result.half_horizon_value = moments[1].mean();
    result.convergence_gap = std::abs(result.value - result.half_horizon_value);
    result.horizon = horizon;
    return result;
}

PairedCost compare_costs(const PomdpModel& model, const Belief& mu, const Policy& first,
                         const Policy& second, Criterion criterion, std::size_t horizon,
                         std::size_t samples, std::uint64_t seed) {
    require_dimensions(model, mu);
    const bool average = criterion == Criterion::average;
    if (horizon < (average ? 2u : 1u))
        throw std::invalid_argument("paired evaluation horizon is too short");
    const auto weights = step_weights(model, criterion, horizon);
    const std::size_t half = horizon / 2;
    const auto moments = monte_carlo_moments(samples, 4, [&](std::size_t i, std::span<double> out) {
        double half_costs[2] = {0.0, 0.0};
        out[0] = sample_path_cost(model, mu, first, weights, CounterRng(seed, i), half, &half_costs[0]);
        out[1] = sample_path_cost(model, mu, second, weights, CounterRng(seed, i), half, &half_costs[1]);
        out[2] = out[0] - out[1];
        // Rescale the first-half partial sums from 1/T to 1/(T/2) weights.
        out[3] = average ? (half_costs[0] - half_costs[1]) * static_cast<double>(horizon) /
                               static_cast<double>(half)
                         : 0.0;
    });
    PairedCost r{moments[0].estimate(), moments[1].estimate(), moments[2].estimate(), {}, horizon};
    if (average)
        r.half_horizon_difference = moments[3].estimate();
    return r;
}

} // namespace filterstab
