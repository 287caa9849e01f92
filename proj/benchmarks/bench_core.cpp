// Microbenchmarks for the hot paths: scoring sweeps over long series, the
// threshold search, full run selection, componentization, and the LSTM cell.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "stormwarn/ensemble.hpp"
#include "stormwarn/labeling.hpp"
#include "stormwarn/lstm.hpp"
#include "stormwarn/rng.hpp"
#include "stormwarn/synth.hpp"
#include "stormwarn/verify.hpp"

using namespace stormwarn;

namespace {

LabelSeries random_labels(std::size_t n, double rate, std::uint64_t seed) {
  Rng rng(seed);
  LabelSeries s;
  for (std::size_t i = 0; i < n; ++i) {
    s.values.push_back(rng.bernoulli(rate) ? 1 : 0);
    s.mask.push_back(1);
    s.timestamps.push_back(kSynthStartTimestamp +
                           static_cast<std::int64_t>(i) * 3600);
  }
  return s;
}

void bm_value_weighted_matrix(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const LabelSeries actual = random_labels(n, 0.05, 11);
  PredictionSeries predicted;
  Rng rng(12);
  for (std::size_t i = 0; i < n; ++i)
    predicted.values.push_back(rng.bernoulli(0.08) ? 1 : 0);
  WeightWindowConfig window;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        value_weighted_confusion_matrix(actual, predicted, window));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void bm_optimal_threshold(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const LabelSeries actual = random_labels(n, 105.0 / 7128.0, 21);
  Rng rng(22);
  std::vector<double> probs(n);
  for (double& p : probs) p = rng.uniform01();
  WeightWindowConfig window;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        optimal_threshold(probs, actual, Score::wtss, window));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void bm_select_run(benchmark::State& state) {
  StudyConfig cfg;
  cfg.base.seed = 31;
  const SyntheticStudy study = generate_study(cfg);
  EnsembleConfig ens;
  ens.selection_score = Score::wtss;
  ens.run_score = Score::wtss;
  for (auto _ : state)
    benchmark::DoNotOptimize(select_run(study.runs, study.labels, ens));
}

void bm_components(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  RainGrid grid;
  grid.rows = side;
  grid.cols = side;
  grid.lat0 = 44.0;
  grid.lon0 = 8.0;
  grid.dlat = 0.009;
  grid.dlon = 0.013267;
  grid.timestamp = kSynthStartTimestamp;
  grid.values.resize(static_cast<std::size_t>(side) * side);
  Rng rng(41);
  for (double& v : grid.values) v = rng.bernoulli(0.3) ? 60.0 : 1.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        over_threshold_components(grid, 50.0, 3, Connectivity::four));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(side) * side);
}

void bm_lstm_cell(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const int input = 16;
  Rng rng(51);
  LstmParams p = LstmParams::zeros(input, hidden);
  for (auto* m : {&p.W_xi, &p.W_xf, &p.W_xc, &p.W_xo, &p.W_hi, &p.W_hf, &p.W_hc,
                  &p.W_ho})
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c)
        (*m)(r, c) = rng.uniform01() - 0.5;
  Eigen::VectorXd x(input);
  for (int i = 0; i < input; ++i) x(i) = rng.uniform01() - 0.5;
  LstmState s = LstmState::zeros(hidden);
  for (auto _ : state) {
    s = lstm_cell_step(x, s, p);
    benchmark::DoNotOptimize(s);
  }
}

}  // namespace

BENCHMARK(bm_value_weighted_matrix)->Arg(7128)->Arg(65536);
BENCHMARK(bm_optimal_threshold)->Arg(1296)->Arg(7128);
BENCHMARK(bm_select_run)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_components)->Arg(128)->Arg(512);
BENCHMARK(bm_lstm_cell)->Arg(8)->Arg(50);

BENCHMARK_MAIN();
