// Throughput benchmarks for the hot paths: boosted-tree training, Shapley
// attribution, correlation statistics, and national scaling.

#include "spvcap/capacity.hpp"
#include "spvcap/gbtree.hpp"
#include "spvcap/shap.hpp"
#include "spvcap/stats.hpp"
#include "spvcap/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

namespace {

spvcap::TrainingMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cols; ++c) names.push_back("f" + std::to_string(c));
    spvcap::TrainingMatrix matrix(names, rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double target = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = value(rng);
            matrix.set(r, c, v);
            target += (c % 2 == 0 ? 1.0 : -0.5) * v;
        }
        matrix.target[r] = target + noise(rng);
    }
    return matrix;
}

void BM_TrainBoostedTrees(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const spvcap::TrainingMatrix matrix = random_matrix(rows, 8, 11);
    spvcap::Hyperparams hp;
    hp.n_rounds = 50;
    hp.learning_rate = 0.1;
    hp.max_depth = 4;
    for (auto _ : state) {
        const spvcap::GBTModel model = spvcap::train(matrix, hp);
        benchmark::DoNotOptimize(model.trees.size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows) * hp.n_rounds);
}
BENCHMARK(BM_TrainBoostedTrees)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_TreeShap(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const spvcap::TrainingMatrix matrix = random_matrix(rows, 8, 23);
    spvcap::Hyperparams hp;
    hp.n_rounds = 100;
    hp.max_depth = 4;
    const spvcap::GBTModel model = spvcap::train(matrix, hp);
    for (auto _ : state) {
        const auto explanations = spvcap::tree_shap_all(model, matrix, matrix, 1);
        benchmark::DoNotOptimize(explanations.size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_TreeShap)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SpearmanCorrelation(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    spvcap::PairedSeries series;
    for (std::size_t i = 0; i < n; ++i) {
        series.x.push_back(value(rng));
        series.y.push_back(value(rng));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(spvcap::spearman(series));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SpearmanCorrelation)->Arg(1000)->Arg(10000);

void BM_ScaleToNational(benchmark::State& state) {
    const int regions = static_cast<int>(state.range(0));
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> mw(0.1, 50.0);
    std::vector<spvcap::RegionalEstimate> estimates;
    std::map<int, double> national;
    for (int year = 2010; year <= 2023; ++year) {
        national[year] = 4000.0;
        for (int i = 0; i < regions; ++i) {
            estimates.push_back(
                {spvcap::synthetic_region_code(i), year, 0.0, mw(rng), std::nullopt});
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(spvcap::scale_to_national(estimates, national).size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(estimates.size()));
}
BENCHMARK(BM_ScaleToNational)->Arg(168);

}  // namespace

BENCHMARK_MAIN();
