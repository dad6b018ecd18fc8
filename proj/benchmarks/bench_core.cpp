#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "mlconf/classifiers.hpp"
#include "mlconf/confidence.hpp"
#include "mlconf/metrics.hpp"
#include "mlconf/stats.hpp"
#include "mlconf/synth.hpp"

using namespace mlconf;

namespace {

LabelsetDistribution random_dist(std::mt19937_64& rng, int L) {
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    std::vector<double> p(std::size_t{1} << L);
    double total = 0.0;
    for (double& v : p) total += (v = u(rng));
    for (double& v : p) v /= total;
    return make_distribution(p, L);
}

void bm_score_all(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const LabelsetDistribution d = random_dist(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_all(d));
    }
}

void bm_best_prediction_js(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const LabelsetDistribution d = random_dist(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(best_prediction(d, Metric::JaccardSimilarity));
    }
}

void bm_kendall_tau(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = u(rng);
        b[i] = u(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(kendall_tau(a, b));
    }
}

void bm_chain_predict(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const SyntheticData sd = synth_generate(L, 400, SynthDependence::Chain, 5);
    std::vector<int> order(static_cast<std::size_t>(L));
    std::iota(order.begin(), order.end(), 1);
    const MultiLabelModel m = train_chain(sd.dataset, order, SolverConfig{});
    const Eigen::VectorXd x = sd.dataset.features.row(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict_joint(m, x));
    }
}

}  // namespace

BENCHMARK(bm_score_all)->Arg(4)->Arg(8)->Arg(12);
BENCHMARK(bm_best_prediction_js)->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(bm_kendall_tau)->Arg(100)->Arg(1000)->Arg(10000);
BENCHMARK(bm_chain_predict)->Arg(3)->Arg(6)->Arg(9);

BENCHMARK_MAIN();
