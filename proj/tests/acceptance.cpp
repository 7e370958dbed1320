// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "cli.hpp"
#include "filterstab/bounds.hpp"
#include "filterstab/contraction.hpp"
#include "filterstab/filter.hpp"
#include "filterstab/metrics.hpp"
#include "filterstab/observability.hpp"
#include "filterstab/robustness.hpp"

#include "test_support.hpp"

#include <tbb/global_control.h>
#include <tbb/task_arena.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace filterstab;
using filterstab::testing::canonical_model;
using filterstab::testing::fixture;
using filterstab::testing::random_kernel;
using filterstab::testing::random_model;
using filterstab::testing::random_row;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

template <typename... Args>
std::string format(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

std::vector<ActionIndex> replay(const Policy& policy, const std::vector<ObsIndex>& ys) {
    auto c = policy.start();
    std::vector<ActionIndex> us;
    for (std::size_t t = 0; t + 1 < ys.size(); ++t)
        us.push_back(c->act(ys[t]));
    return us;
}

Belief full_support(std::mt19937_64& rng, std::size_t n) {
    return Belief::normalized(random_row(rng, n));
}

struct StableFixture {
    std::string name;
    PomdpModel model;
    Belief mu;
    Belief nu;
    std::shared_ptr<Policy> policy;
};

// The canonical model plus random models whose contraction constant is below one.
std::vector<StableFixture> stable_fixtures() {
    std::vector<StableFixture> out;
    const auto canonical = canonical_model();
    out.push_back({"canonical", canonical, Belief::from_probabilities({0.999, 0.001}),
                   Belief::from_probabilities({0.001, 0.999}),
                   std::make_shared<HistoryHashPolicy>(2, 1)});
    auto table = std::make_shared<const BeliefPolicy>(value_iteration_discounted(canonical, 40));
    const Belief nu = Belief::from_probabilities({0.2, 0.8});
    out.push_back({"canonical/solved", canonical, Belief::from_probabilities({0.9, 0.1}), nu,
                   std::make_shared<BeliefFeedbackPolicy>(canonical, table, nu)});
    out.push_back({"uniform-mixing", load_model(fixture("uniform_mixing.json")),
                   Belief::from_probabilities({0.95, 0.05}), Belief::from_probabilities({0.1, 0.9}),
                   std::make_shared<FixedActionPolicy>(1)});

    std::mt19937_64 rng(2024);
    while (out.size() < 10) {
        const std::size_t nx = 2 + out.size() % 2;
        const std::size_t ny = 2 + out.size() % 3;
        const std::size_t nu_count = 1 + out.size() % 3;
        auto m = random_model(rng, nx, ny, nu_count, 0.9, 0.15);
        // alpha = 0 makes the envelope checks trivial.
        const double alpha = contraction_report(m).alpha;
        if (!(alpha > 0.05 && alpha < 1.0))
            continue;
        const Belief mu = Belief::normalized(random_row(rng, nx, 0.3));
        const Belief nu_b = full_support(rng, nx);
        out.push_back({"random" + std::to_string(out.size()), std::move(m), mu, nu_b,
                       std::make_shared<HistoryHashPolicy>(nu_count, out.size())});
    }
    return out;
}

Outcome filter_oracle_equivalence() {
    std::mt19937_64 rng(11);
    const std::size_t horizon = 6;
    double worst = 0.0;
    std::size_t paths = 0, models = 0, big = 0;
    for (std::size_t i = 0; i < 20; ++i) {
        const std::size_t nx = 2 + i % 3;
        const std::size_t ny = 2 + (i / 3) % 3;
        const std::size_t nu = 1 + i % 3;
        const auto m = random_model(rng, nx, ny, nu, 0.9, i % 2 ? 0.25 : 0.0);
        const Belief prior = Belief::normalized(random_row(rng, nx, 0.2));
        const HistoryHashPolicy policy(nu, i);
        // The full 4x4 horizon-6 enumeration has ~2.7e8 joint paths.
        const auto table = enumeration_oracle(m, prior, policy, horizon, 3e8);
        for (const auto& [ys, entry] : table) {
            const auto states = run_filter(m, prior, ys, replay(policy, ys));
            const Belief& f = states.back().filter;
            for (std::size_t x = 0; x < nx; ++x)
                worst = std::max(worst, std::abs(f[x] - entry.filter[x]));
            ++paths;
        }
        ++models;
        big += (nx == 4 && ny == 4);
    }
    return {worst <= 1e-12,
            format("%zu models (%zu with |X|=|Y|=4), %zu observation paths at horizon 6, "
                   "max |filter - oracle| = %.3g (tol 1e-12)",
                   models, big, paths, worst)};
}

Outcome contraction_certification() {
    const auto fixtures = stable_fixtures();
    std::size_t exact_checks = 0, mc_checks = 0, failures = 0;
    double worst_exact = -1e300, worst_ratio = -1e300, worst_mc = -1e300;
    double alpha_lo = 1.0, alpha_hi = 0.0;
    for (const auto& f : fixtures) {
        const double alpha = contraction_report(f.model).alpha;
        alpha_lo = std::min(alpha_lo, alpha);
        alpha_hi = std::max(alpha_hi, alpha);
        const auto env = contraction_envelope(alpha, 25);
        const auto exact = filter_stability_trace(f.model, f.mu, f.nu, *f.policy, 8, Enumerate{});
        for (std::size_t n = 0; n < exact.size(); ++n) {
            const double excess = exact[n].tv.value - env[n];
            worst_exact = std::max(worst_exact, excess);
            failures += excess > 1e-10;
            ++exact_checks;
            if (n + 1 < exact.size()) {
                const double e0 = exact[n].tv.value, e1 = exact[n + 1].tv.value;
                if (e0 > 0.0) {
                    const double r = e1 / e0 - alpha;
                    worst_ratio = std::max(worst_ratio, r);
                    failures += r > 1e-10;
                } else {
                    failures += e1 != 0.0;
                }
            }
        }
        const auto mc =
            filter_stability_trace(f.model, f.mu, f.nu, *f.policy, 25, MonteCarlo{100000, 7});
        for (std::size_t n = 0; n < mc.size(); ++n) {
            const double excess = mc[n].tv.value - env[n] - 3.0 * mc[n].tv.std_error;
            worst_mc = std::max(worst_mc, excess);
            failures += excess > 0.0;
            ++mc_checks;
        }
    }
    return {failures == 0,
            format("%zu fixtures with alpha in [%.3g, %.3g]; exact n<=8: max(E_tv - 2a^n) = %.3g, "
                   "max(E_{n+1}/E_n - a) = %.3g; MC n<=25 (1e5 samples): max(E_tv - 2a^n - 3SE) "
                   "= %.3g; %zu+%zu checks",
                   fixtures.size(), alpha_lo, alpha_hi, worst_exact, worst_ratio, worst_mc, exact_checks, mc_checks)};
}

Outcome martingale_identity() {
    auto fixtures = stable_fixtures();
    std::mt19937_64 rng(5);
    fixtures.push_back({"frozen", load_model(fixture("frozen.json")),
                        Belief::from_probabilities({0.9, 0.1}),
                        Belief::from_probabilities({0.2, 0.8}),
                        std::make_shared<FixedActionPolicy>(0)});
    for (int i = 0; i < 5; ++i) {
        const std::size_t nx = 2 + i % 3;
        fixtures.push_back({"sparse", random_model(rng, nx, 2 + i % 2, 2, 0.9, 0.4),
                            Belief::normalized(random_row(rng, nx, 0.4)), full_support(rng, nx),
                            std::make_shared<HistoryHashPolicy>(2, i)});
    }
    double worst = 0.0;
    std::size_t checks = 0;
    for (const auto& f : fixtures)
        for (std::size_t n = 0; n <= 4; ++n) {
            worst = std::max(worst,
                             tv_martingale_identity_check(f.model, f.mu, f.nu, *f.policy, n).gap);
            ++checks;
        }
    return {worst <= 1e-10, format("%zu fixtures x n=0..4: max |lhs - rhs| = %.3g (tol 1e-10)",
                                   fixtures.size(), worst)};
}

Outcome pinsker() {
    std::mt19937_64 rng(99);
    std::size_t violations = 0;
    double worst = -1e300;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t n = 2 + i % 7;
        const auto p = random_row(rng, n, 0.25);
        const auto q = random_row(rng, n, i % 4 == 0 ? 0.25 : 0.0);
        const double tv = tv_distance(p, q);
        const double rhs = std::sqrt(2.0 * relative_entropy(p, q));
        violations += !(tv <= rhs);
        if (std::isfinite(rhs))
            worst = std::max(worst, tv - rhs);
    }
    return {violations == 0,
            format("10000 random pairs: %zu violations, max finite (tv - sqrt(2 D)) = %.3g",
                   violations, worst)};
}

Outcome instability_witness() {
    const auto m = load_model(fixture("frozen.json"));
    const Belief mu = Belief::from_probabilities({0.9, 0.1});
    const Belief nu = Belief::from_probabilities({0.2, 0.8});
    const double tv0 = tv_distance(mu, nu);
    double worst = 0.0;
    const FixedActionPolicy policy(0);
    for (const auto& p : filter_stability_trace(m, mu, nu, policy, 12, Enumerate{}))
        worst = std::max(worst, std::abs(p.tv.value - tv0));
    for (const auto& p : filter_stability_trace(m, mu, nu, policy, 25, MonteCarlo{10000, 3}))
        worst = std::max(worst, std::abs(p.tv.value - tv0));
    const auto c = contraction_report(m);
    const auto o = observability_report(m);
    const bool ok = worst <= 1e-12 && c.alpha == 1.0 && !o.observable;
    return {ok, format("frozen fixture: max |E_tv(n) - tv(mu,nu)| over n<=25 = %.3g, alpha = %g, "
                       "rank(Q) = %zu, observable = %s",
                       worst, c.alpha, o.rank_Q, o.observable ? "yes" : "no")};
}

struct RobustnessCase {
    std::string name;
    PomdpModel model;
    Belief mu;
    Belief nu;
};

std::vector<RobustnessCase> discounted_cases() {
    std::vector<RobustnessCase> out;
    const auto canonical = canonical_model();
    out.push_back({"canonical far", canonical, Belief::from_probabilities({0.999, 0.001}),
                   Belief::from_probabilities({0.001, 0.999})});
    out.push_back({"canonical near", canonical, Belief::from_probabilities({0.6, 0.4}),
                   Belief::from_probabilities({0.4, 0.6})});
    out.push_back({"canonical beta=0.5", canonical_model(0.5),
                   Belief::from_probabilities({0.95, 0.05}), Belief::from_probabilities({0.3, 0.7})});
    out.push_back({"uniform mixing", load_model(fixture("uniform_mixing.json")),
                   Belief::from_probabilities({0.99, 0.01}), Belief::from_probabilities({0.01, 0.99})});
    std::mt19937_64 rng(77);
    for (int i = 0; i < 2; ++i) {
        const std::size_t nx = 2 + i;
        out.push_back({"random" + std::to_string(i), random_model(rng, nx, 2, 2, 0.9),
                       Belief::normalized(random_row(rng, nx, 0.3)), full_support(rng, nx)});
    }
    return out;
}

Outcome discounted_continuity() {
    std::size_t failures = 0;
    std::string worst;
    double tightest = -1e300;
    for (const auto& c : discounted_cases()) {
        RobustnessSettings s;
        s.samples = 20000;
        s.decomposition_max = 5;
        const auto r = robustness_gap(c.model, c.mu, c.nu, s);
        const double allowance = r.continuity_bound + 3.0 * r.measured_gap.std_error + r.grid_slack;
        failures += r.measured_gap.value > allowance;
        if (r.measured_gap.value - allowance > tightest) {
            tightest = r.measured_gap.value - allowance;
            worst = format("%s: gap %.4g (SE %.2g) vs bound %.4g, slack %.3g", c.name.c_str(),
                           r.measured_gap.value, r.measured_gap.std_error, r.continuity_bound,
                           r.grid_slack);
        }
    }
    return {failures == 0,
            format("%zu fixtures, %zu violations; closest: %s", discounted_cases().size(), failures,
                   worst.c_str())};
}

Outcome prior_independent() {
    std::vector<RobustnessCase> cases;
    cases.push_back({"canonical", canonical_model(), Belief::from_probabilities({0.999, 0.001}),
                     Belief::from_probabilities({0.001, 0.999})});
    ModelData d = canonical_model().data();
    d.transition[1] = Matrix::from_rows({{0.6, 0.4}, {0.35, 0.65}});
    d.observation = Matrix::from_rows({{0.85, 0.15}, {0.1, 0.9}});
    d.cost = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.2}});
    cases.push_back({"two-action variant", PomdpModel(d), Belief::from_probabilities({0.995, 0.005}),
                     Belief::from_probabilities({0.005, 0.995})});

    std::size_t failures = 0;
    std::string lines;
    for (const auto& c : cases) {
        RobustnessSettings s;
        s.samples = 20000;
        s.decomposition_max = 5;
        const auto r = robustness_gap(c.model, c.mu, c.nu, s);
        if (!r.prior_independent) {
            ++failures;
            continue;
        }
        const double b = r.prior_independent->bound;
        const bool ok = r.measured_gap.value <= b + 3.0 * r.measured_gap.std_error + r.grid_slack &&
                        b < r.continuity_bound && r.contraction.alpha < 1.0;
        failures += !ok;
        lines += format("; %s (alpha %.3g, tv %.3g): gap %.4g <= PI bound %.4g < continuity %.4g",
                        c.name.c_str(), r.contraction.alpha, r.tv, r.measured_gap.value, b,
                        r.continuity_bound);
    }
    return {failures == 0, format("%zu fixtures", cases.size()) + lines};
}

Outcome average_span() {
    std::size_t failures = 0;
    std::string lines;
    auto run = [&](const std::string& name, const PomdpModel& m, const Belief& mu, const Belief& nu,
                   bool span_zero) {
        RobustnessSettings s;
        s.criterion = Criterion::average;
        s.samples = 5000;
        s.horizon = 2000;
        const auto r = robustness_gap(m, mu, nu, s);
        const double se = r.measured_gap.std_error;
        const bool ok = span_zero ? r.measured_gap.value <= 3.0 * se
                                  : r.measured_gap.value <= r.span_estimate + 3.0 * se + r.grid_slack;
        failures += !ok;
        lines += format("; %s: gap %.3g (SE %.2g, T/2 drift %.2g) vs span %.3g + slack %.3g", name.c_str(),
                        r.measured_gap.value, se, r.convergence_gap, r.span_estimate, r.grid_slack);
    };
    const auto canonical = canonical_model();
    run("canonical", canonical, Belief::from_probabilities({0.999, 0.001}),
        Belief::from_probabilities({0.001, 0.999}), false);
    run("uniform mixing", load_model(fixture("uniform_mixing.json")),
        Belief::from_probabilities({0.9, 0.1}), Belief::from_probabilities({0.1, 0.9}), false);
    ModelData d = canonical.data();
    d.cost = Matrix::from_rows({{0.4, 0.7}, {0.4, 0.7}});
    run("state-independent cost", PomdpModel(d), Belief::from_probabilities({0.999, 0.001}),
        Belief::from_probabilities({0.001, 0.999}), true);
    return {failures == 0, "3 fixtures" + lines};
}

Outcome closed_form_argmax() {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t accepted = 0, exceptions = 0;
    while (accepted < 1000) {
        const double alpha = 0.01 + 0.98 * unit(rng);
        const double beta = 0.05 + 0.949 * unit(rng);
        const double rho = 1.0 - unit(rng); // (0, 1]
        const auto r = bound_prior_independent(alpha, beta, 1.0, (1.0 - rho) / (1.0 - beta));
        if (!r.closed_form || r.n_star > 200.0)
            continue;
        ++accepted;
        std::size_t best = 0;
        double best_f = prior_independent_objective(alpha, beta, r.rho, 0.0);
        for (std::size_t n = 1; n <= 200; ++n) {
            const double f = prior_independent_objective(alpha, beta, r.rho, static_cast<double>(n));
            if (f > best_f) {
                best_f = f;
                best = n;
            }
        }
        const double nb = static_cast<double>(best);
        exceptions += nb != std::floor(r.n_star) && nb != std::ceil(r.n_star);
    }
    return {exceptions == 0,
            format("%zu in-domain (alpha, beta, rho) triples, %zu argmax exceptions", accepted,
                   exceptions)};
}

PomdpModel channel_model(const Matrix& q) {
    ModelData d;
    d.num_states = q.rows();
    d.num_obs = q.cols();
    d.num_actions = 1;
    d.discount = 0.5;
    d.transition = {identity_matrix(q.rows())};
    d.observation = q;
    d.cost = Matrix(q.rows(), 1);
    return PomdpModel(d);
}

Outcome observability_rank() {
    std::mt19937_64 rng(31);
    std::vector<Matrix> channels;
    for (int i = 0; i < 60; ++i) {
        const std::size_t nx = 2 + i % 3;
        const std::size_t ny = 1 + (i / 3) % 5;
        Matrix q = random_kernel(rng, nx, ny, i % 4 == 0 ? 0.3 : 0.0);
        switch (i % 5) {
        case 1: // duplicate row
            for (std::size_t y = 0; y < ny; ++y)
                q(nx - 1, y) = q(0, y);
            break;
        case 2: // convex combination of two rows
            if (nx >= 3)
                for (std::size_t y = 0; y < ny; ++y)
                    q(2, y) = 0.3 * q(0, y) + 0.7 * q(1, y);
            break;
        default:
            break;
        }
        channels.push_back(q);
    }
    channels.push_back(identity_matrix(3));
    channels.push_back(repeated_rows(3, {0.2, 0.5, 0.3}));

    std::size_t mismatches = 0, observable = 0;
    for (const auto& q : channels) {
        const auto m = channel_model(q);
        const auto report = observability_report(m);
        bool all_fit = true;
        for (std::size_t x = 0; x < q.rows(); ++x) {
            std::vector<double> f(q.rows(), 0.0);
            f[x] = 1.0;
            all_fit = all_fit && approximate_g(m, f, 1e-9).residual <= 1e-9;
        }
        mismatches += report.observable != all_fit;
        observable += report.observable;
    }
    return {mismatches == 0,
            format("%zu channels (%zu observable, %zu rank-deficient): %zu disagreements between "
                   "rank and indicator residuals",
                   channels.size(), observable, channels.size() - observable, mismatches)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome reproducibility() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "filterstab_acceptance";
    fs::remove_all(root);
    const std::string model = fixture("canonical.json").string();
    auto run_all = [&](const fs::path& dir) {
        std::ostringstream out, err;
        int code = cli::run({"stability", "--model", model, "--mu", "0.9,0.1", "--nu", "0.2,0.8",
                             "--samples", "20000", "--seed", "17", "--out", dir.string()},
                            out, err);
        code |= cli::run({"robustness", "--model", model, "--mu", "0.9,0.1", "--nu", "0.2,0.8",
                          "--samples", "5000", "--seed", "17", "--out", dir.string()},
                         out, err);
        return code;
    };
    int code = run_all(root / "a");
    // Same commands with more worker threads than cores.
    tbb::global_control workers(tbb::global_control::max_allowed_parallelism, 4);
    tbb::task_arena arena(4);
    arena.execute([&] { code |= run_all(root / "b"); });
    std::size_t identical = 0;
    const char* files[] = {"stability.csv", "robustness.json", "decomposition.csv"};
    for (const char* f : files)
        identical += !slurp(root / "a" / f).empty() && slurp(root / "a" / f) == slurp(root / "b" / f);
    return {code == 0 && identical == 3,
            format("stability and robustness run twice (default arena, 4-thread arena): %zu/3 "
                   "output files byte-identical, exit codes %s",
                   identical, code == 0 ? "0" : "nonzero")};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"filter oracle equivalence", filter_oracle_equivalence},
        {"contraction certification", contraction_certification},
        {"martingale TV identity", martingale_identity},
        {"Pinsker consistency", pinsker},
        {"instability witness", instability_witness},
        {"discounted continuity bound", discounted_continuity},
        {"prior-independent bound", prior_independent},
        {"average-cost span bound", average_span},
        {"n* closed form", closed_form_argmax},
        {"observability rank check", observability_rank},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
