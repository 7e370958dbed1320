#include "filterstab/contraction.hpp"
#include "filterstab/filter.hpp"
#include "filterstab/metrics.hpp"
#include "filterstab/policy.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace filterstab;

namespace {

PomdpModel random_model(std::size_t nx, std::size_t ny, std::size_t nu) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    auto kernel = [&](std::size_t r, std::size_t c) {
        Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            double total = 0.0;
            for (std::size_t j = 0; j < c; ++j)
                total += (m(i, j) = unit(rng));
            for (std::size_t j = 0; j < c; ++j)
                m(i, j) /= total;
        }
        return m;
    };
    ModelData d;
    d.num_states = nx;
    d.num_obs = ny;
    d.num_actions = nu;
    d.discount = 0.9;
    for (std::size_t u = 0; u < nu; ++u)
        d.transition.push_back(kernel(nx, nx));
    d.observation = kernel(nx, ny);
    d.cost = kernel(nx, nu);
    return PomdpModel(d);
}

void BM_FilterStep(benchmark::State& state) {
    const auto nx = static_cast<std::size_t>(state.range(0));
    const auto m = random_model(nx, 4, 2);
    std::vector<double> b(nx, 1.0 / static_cast<double>(nx)), next(nx);
    ObsIndex y = 0;
    for (auto _ : state) {
        measurement_update_inplace(m, b, y);
        time_update_into(m, b, 1, next);
        b.swap(next);
        y = (y + 1) % 4;
        benchmark::DoNotOptimize(b.data());
    }
}
BENCHMARK(BM_FilterStep)->Arg(2)->Arg(4)->Arg(16);

void BM_Contraction(benchmark::State& state) {
    const auto m = random_model(static_cast<std::size_t>(state.range(0)), 4, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(contraction_report(m));
}
BENCHMARK(BM_Contraction)->Arg(4)->Arg(16);

void BM_StabilityTraceExact(benchmark::State& state) {
    const auto m = random_model(3, 3, 2);
    const auto mu = Belief::from_probabilities({0.8, 0.1, 0.1});
    const auto nu = Belief::uniform(3);
    const HistoryHashPolicy policy(2, 1);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(filter_stability_trace(m, mu, nu, policy, n, Enumerate{}));
}
BENCHMARK(BM_StabilityTraceExact)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_StabilityTraceMonteCarlo(benchmark::State& state) {
    const auto m = random_model(3, 3, 2);
    const auto mu = Belief::from_probabilities({0.8, 0.1, 0.1});
    const auto nu = Belief::uniform(3);
    const HistoryHashPolicy policy(2, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            filter_stability_trace(m, mu, nu, policy, 25, MonteCarlo{10000, 1}));
}
BENCHMARK(BM_StabilityTraceMonteCarlo)->Unit(benchmark::kMillisecond);

} // namespace
