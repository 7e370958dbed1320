#include "filterstab/evaluation.hpp"
#include "filterstab/grid.hpp"
#include "filterstab/value_iteration.hpp"

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

using namespace filterstab;

namespace {

PomdpModel canonical() {
    ModelData d;
    d.num_states = 2;
    d.num_obs = 2;
    d.num_actions = 2;
    d.discount = 0.9;
    const auto t = Matrix::from_rows({{0.8, 0.2}, {0.3, 0.7}});
    d.transition = {t, t};
    d.observation = Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
    d.cost = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    return PomdpModel(d);
}

void BM_GridProject(benchmark::State& state) {
    const auto nx = static_cast<std::size_t>(state.range(0));
    const BeliefGrid grid(nx, 20);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> beliefs(256, std::vector<double>(nx));
    for (auto& b : beliefs) {
        double total = 0.0;
        for (auto& v : b)
            total += (v = unit(rng));
        for (auto& v : b)
            v /= total;
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid.project(beliefs[i]));
        i = (i + 1) % beliefs.size();
    }
}
BENCHMARK(BM_GridProject)->Arg(2)->Arg(3)->Arg(4);

void BM_ValueIteration(benchmark::State& state) {
    const auto m = canonical();
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(value_iteration_discounted(m, k));
}
BENCHMARK(BM_ValueIteration)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_FeedbackCostMonteCarlo(benchmark::State& state) {
    const auto m = canonical();
    const auto table = std::make_shared<const BeliefPolicy>(value_iteration_discounted(m, 40));
    const auto mu = Belief::from_probabilities({0.9, 0.1});
    const auto nu = Belief::from_probabilities({0.2, 0.8});
    const BeliefFeedbackPolicy policy(m, table, nu);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            evaluate_cost_discounted(m, mu, policy, MonteCarloCost{0, 2000, 1}));
}
BENCHMARK(BM_FeedbackCostMonteCarlo)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
