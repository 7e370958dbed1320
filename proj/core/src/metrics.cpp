#include "filterstab/metrics.hpp"

#include "filterstab/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace filterstab {

double tv_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw std::invalid_argument("tv_distance: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        total += std::abs(p[i] - q[i]);
    return total;
}

double relative_entropy(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw std::invalid_argument("relative_entropy: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0)
            continue;
        if (q[i] <= 0.0)
            return std::numeric_limits<double>::infinity();
        total += p[i] * std::log(p[i] / q[i]);
    }
    // Rounding can push an exact zero slightly negative.
    return std::max(total, 0.0);
}

TestFunctions default_test_functions(std::size_t num_states) {
    TestFunctions out;
    for (std::size_t x = 0; x < num_states; ++x) {
        std::vector<double> f(num_states, 0.0);
        f[x] = 1.0;
        out.push_back(std::move(f));
    }
    if (num_states > 1) {
        std::vector<double> ramp(num_states);
        for (std::size_t x = 0; x < num_states; ++x)
            ramp[x] = -1.0 + 2.0 * static_cast<double>(x) / static_cast<double>(num_states - 1);
        out.push_back(std::move(ramp));
    }
    return out;
}

double weak_surrogate(std::span<const double> p, std::span<const double> q,
                      const TestFunctions& functions) {
    if (p.size() != q.size())
        throw std::invalid_argument("weak_surrogate: length mismatch");
    double best = 0.0;
    for (const auto& f : functions) {
        if (f.size() != p.size())
            throw std::invalid_argument("weak_surrogate: test function has wrong length");
        double acc = 0.0;
        for (std::size_t x = 0; x < p.size(); ++x) {
            if (std::abs(f[x]) > 1.0)
                throw std::invalid_argument("weak_surrogate: test function exceeds 1 in sup norm");
            acc += f[x] * (p[x] - q[x]);
        }
        best = std::max(best, std::abs(acc));
    }
    return best;
}

namespace {

void check_priors(const PomdpModel& model, const Belief& mu, const Belief& nu) {
    if (mu.size() != model.num_states() || nu.size() != model.num_states())
        throw std::invalid_argument("prior length does not match the model");
    require_absolutely_continuous(mu, nu);
}

void check_budget(std::size_t branching, std::size_t depth, double limit) {
    const double required =
        std::pow(static_cast<double>(branching), static_cast<double>(depth));
    if (required > limit)
        throw EnumerationLimitError(required, limit);
}

using Vec = std::vector<double>;

struct TraceSums {
    std::vector<double> tv;
    std::vector<double> re;
};

// Walks the observation tree carrying P^mu(y_{0:t-1}) and both predictors.
void enumerate_trace(const PomdpModel& model, std::size_t t, std::size_t n_max, double weight,
                     const Vec& pred_mu, const Vec& pred_nu, const Controller& controller,
                     TraceSums& sums) {
    const std::size_t nx = model.num_states();
    Vec filt_mu(nx), filt_nu(nx), next_mu(nx), next_nu(nx);
    for (ObsIndex y = 0; y < model.num_obs(); ++y) {
        filt_mu = pred_mu;
        const double lik_mu = measurement_update_inplace(model, filt_mu, y);
        if (lik_mu == 0.0)
            continue;
        filt_nu = pred_nu;
        if (measurement_update_inplace(model, filt_nu, y) == 0.0)
            throw ZeroLikelihood(y, t);
        const double w = weight * lik_mu;
        sums.tv[t] += w * tv_distance(filt_mu, filt_nu);
        sums.re[t] += w * relative_entropy(filt_mu, filt_nu);
        if (t == n_max)
            continue;
        auto branch = controller.clone();
        const ActionIndex u = branch->act(y);
        time_update_into(model, filt_mu, u, next_mu);
        time_update_into(model, filt_nu, u, next_nu);
        enumerate_trace(model, t + 1, n_max, w, next_mu, next_nu, *branch, sums);
    }
}

double enumerate_predictor_tv(const PomdpModel& model, std::size_t t, std::size_t n,
                              double weight, const Vec& pred_mu, const Vec& pred_nu,
                              const Controller& controller) {
    if (t == n)
        return weight * tv_distance(pred_mu, pred_nu);
    const std::size_t nx = model.num_states();
    Vec filt_mu(nx), filt_nu(nx), next_mu(nx), next_nu(nx);
    double total = 0.0;
    for (ObsIndex y = 0; y < model.num_obs(); ++y) {
        filt_mu = pred_mu;
        const double lik_mu = measurement_update_inplace(model, filt_mu, y);
        if (lik_mu == 0.0)
            continue;
        filt_nu = pred_nu;
        if (measurement_update_inplace(model, filt_nu, y) == 0.0)
            throw ZeroLikelihood(y, t);
        auto branch = controller.clone();
        const ActionIndex u = branch->act(y);
        time_update_into(model, filt_mu, u, next_mu);
        time_update_into(model, filt_nu, u, next_nu);
        total += enumerate_predictor_tv(model, t + 1, n, weight * lik_mu, next_mu, next_nu, *branch);
    }
    return total;
}

} // namespace

StabilityTrace filter_stability_trace(const PomdpModel& model, const Belief& mu, const Belief& nu,
                                      const Policy& policy, std::size_t n_max,
                                      const EstimationMethod& method) {
    check_priors(model, mu, nu);
    const std::size_t steps = n_max + 1;
    StabilityTrace trace(steps);
    for (std::size_t n = 0; n < steps; ++n)
        trace[n].n = n;

    if (const auto* e = std::get_if<Enumerate>(&method)) {
        check_budget(model.num_obs(), steps, e->limit);
        TraceSums sums{Vec(steps, 0.0), Vec(steps, 0.0)};
        auto controller = policy.start();
        enumerate_trace(model, 0, n_max, 1.0, Vec(mu.probs().begin(), mu.probs().end()),
                        Vec(nu.probs().begin(), nu.probs().end()), *controller, sums);
        for (std::size_t n = 0; n < steps; ++n) {
            trace[n].tv = {sums.tv[n], 0.0};
            trace[n].relative_entropy = {sums.re[n], 0.0};
        }
        return trace;
    }

    const auto& mc = std::get<MonteCarlo>(method);
    const std::size_t nx = model.num_states();
    const Matrix& q = model.observation();
    auto sample = [&](std::size_t index, std::span<double> out) {
        CounterRng rng(mc.seed, index);
        Vec pm(mu.probs().begin(), mu.probs().end());
        Vec pn(nu.probs().begin(), nu.probs().end());
        Vec next(nx);
        StateIndex x = rng.categorical(mu.probs());
        auto controller = policy.start();
        for (std::size_t t = 0; t < steps; ++t) {
            const ObsIndex y = rng.categorical(q.row(x));
            measurement_update_inplace(model, pm, y);
            if (measurement_update_inplace(model, pn, y) == 0.0)
                throw ZeroLikelihood(y, t);
            out[t] = tv_distance(pm, pn);
            out[steps + t] = relative_entropy(pm, pn);
            if (t + 1 == steps)
                break;
            const ActionIndex u = controller->act(y);
            x = rng.categorical(model.transition(u).row(x));
            time_update_into(model, pm, u, next);
            pm.swap(next);
            time_update_into(model, pn, u, next);
            pn.swap(next);
        }
    };
    const auto moments = monte_carlo_moments(mc.samples, 2 * steps, sample);
    for (std::size_t n = 0; n < steps; ++n) {
        trace[n].tv = moments[n].estimate();
        trace[n].relative_entropy = moments[steps + n].estimate();
    }
    return trace;
}

Estimate expected_filter_tv(const PomdpModel& model, const Belief& mu, const Belief& nu,
                            const Policy& policy, std::size_t n, const EstimationMethod& method) {
    return filter_stability_trace(model, mu, nu, policy, n, method).back().tv;
}

double expected_predictor_tv(const PomdpModel& model, const Belief& mu, const Belief& nu,
                             const Policy& policy, std::size_t n, double limit) {
    check_priors(model, mu, nu);
    check_budget(model.num_obs(), n, limit);
    auto controller = policy.start();
    return enumerate_predictor_tv(model, 0, n, 1.0, Vec(mu.probs().begin(), mu.probs().end()),
                                  Vec(nu.probs().begin(), nu.probs().end()), *controller);
}

MartingaleCheck tv_martingale_identity_check(const PomdpModel& model, const Belief& mu,
                                             const Belief& nu, const Policy& policy, std::size_t n,
                                             double limit) {
    check_priors(model, mu, nu);
    const std::size_t nx = model.num_states();
    const std::size_t ny = model.num_obs();
    const double required = std::pow(static_cast<double>(nx), static_cast<double>(n + 1)) *
                            std::pow(static_cast<double>(ny), static_cast<double>(n));
    if (required > limit)
        throw EnumerationLimitError(required, limit);

    MartingaleCheck check;
    check.lhs = expected_predictor_tv(model, mu, nu, policy, n, limit);

    const Matrix& q = model.observation();
    std::vector<ObsIndex> ys(n, 0);
    std::vector<ActionIndex> us(n);
    Vec mass(nx), weighted(nx); // P^nu(Y = ys, X_n = x) and E^nu[dmu/dnu(X_0); Y = ys, X_n = x]

    auto walk = [&](auto&& self, std::size_t t, StateIndex x, double w, double density) -> void {
        if (w == 0.0)
            return;
        if (t == n) {
            mass[x] += w;
            weighted[x] += w * density;
            return;
        }
        const double emit = q(x, ys[t]);
        const auto row = model.transition(us[t]).row(x);
        for (StateIndex x2 = 0; x2 < nx; ++x2)
            self(self, t + 1, x2, w * emit * row[x2], density);
    };

    while (true) {
        auto controller = policy.start();
        for (std::size_t t = 0; t < n; ++t)
            us[t] = controller->act(ys[t]);

        std::fill(mass.begin(), mass.end(), 0.0);
        std::fill(weighted.begin(), weighted.end(), 0.0);
        for (StateIndex x0 = 0; x0 < nx; ++x0)
            if (nu[x0] > 0.0)
                walk(walk, 0, x0, nu[x0], mu[x0] / nu[x0]);

        double p_y = 0.0, a_y = 0.0;
        for (StateIndex x = 0; x < nx; ++x) {
            p_y += mass[x];
            a_y += weighted[x];
        }
        if (p_y > 0.0) {
            const double coarse = a_y / p_y;
            for (StateIndex x = 0; x < nx; ++x)
                if (mass[x] > 0.0)
                    check.rhs += mass[x] * std::abs(weighted[x] / mass[x] - coarse);
        }

        std::size_t pos = n;
        bool done = true;
        while (pos > 0) {
            --pos;
            if (++ys[pos] < ny) {
                done = false;
                break;
            }
            ys[pos] = 0;
        }
        if (done)
            break;
    }
    check.gap = std::abs(check.lhs - check.rhs);
    return check;
}

} // namespace filterstab
