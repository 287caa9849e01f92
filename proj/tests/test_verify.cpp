#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "stormwarn/errors.hpp"
#include "stormwarn/rng.hpp"
#include "stormwarn/series.hpp"
#include "stormwarn/verify.hpp"

using namespace stormwarn;

namespace {

// All 0/1 vectors of a given length, counter-encoded.
std::vector<std::uint8_t> bits(unsigned code, int len) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) v[static_cast<std::size_t>(i)] = (code >> i) & 1u;
  return v;
}

LabelSeries random_series(Rng& rng, std::size_t n, double rate,
                          double mask_rate) {
  std::vector<std::uint8_t> values(n), mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = rng.bernoulli(rate) ? 1 : 0;
    mask[i] = rng.bernoulli(mask_rate) ? 0 : 1;
  }
  LabelSeries s = LabelSeries::hourly(values);
  s.mask = mask;
  return s;
}

PredictionSeries random_prediction(Rng& rng, std::size_t n, double rate) {
  PredictionSeries p;
  p.values.resize(n);
  for (auto& v : p.values) v = rng.bernoulli(rate) ? 1 : 0;
  return p;
}

}  // namespace

TEST_CASE("published best-run score table reproduces") {
  struct Row {
    double tn, fp, fn, tp, wfp, wfn;
    double tss_v, csi_v, wtss_v, wcsi_v;
  };
  const Row rows[] = {
      {1730, 136, 4, 29, 229.83, 4.75, 0.8059, 0.1716, 0.742, 0.11},
      {1765, 101, 4, 29, 166.58, 8.0, 0.8247, 0.2164, 0.6975, 0.1425},
      {1767, 99, 6, 27, 171.67, 8.0, 0.7651, 0.2045, 0.6829, 0.1306},
  };
  for (const Row& r : rows) {
    const ScoreTable plain{r.tn, r.fp, r.fn, r.tp};
    const ScoreTable weighted{r.tn, r.wfp, r.wfn, r.tp};
    CHECK(std::abs(tss(plain) - r.tss_v) < 5e-4);
    CHECK(std::abs(csi(plain) - r.csi_v) < 5e-4);
    CHECK(std::abs(wtss(weighted) - r.wtss_v) < 5e-4);
    CHECK(std::abs(wcsi(weighted) - r.wcsi_v) < 5e-4);
  }
}

TEST_CASE("weight matches the defining formula on every window pair") {
  for (int T = 1; T <= 4; ++T) {
    WeightWindowConfig cfg;
    cfg.T = T;
    const unsigned top = 1u << T;
    for (unsigned si = 0; si < top; ++si) {
      for (unsigned ti = 0; ti < top; ++ti) {
        const auto s = bits(si, T);
        const auto t = bits(ti, T);
        const double expected = oracle::weight(s, t);
        CHECK(weight(s, t, cfg) == expected);
        CHECK(detail::scaled_to_double(weight_scaled(s, t, cfg),
                                       cfg.denominator()) ==
              doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("weight edge values") {
  WeightWindowConfig cfg;
  cfg.T = 3;
  const std::vector<std::uint8_t> quiet = {0, 0, 0};
  const std::vector<std::uint8_t> first = {1, 0, 0};
  const std::vector<std::uint8_t> all = {1, 1, 1};
  const std::vector<std::uint8_t> last = {0, 0, 1};
  const std::vector<std::uint8_t> two = {0, 0};
  CHECK(weight(quiet, quiet, cfg) == 2.0);
  CHECK(weight(first, quiet, cfg) == 1.0);
  CHECK(weight(quiet, first, cfg) == 0.5);
  CHECK(weight(all, last, cfg) == 1.0 - 1.0 / 4.0);
  CHECK_THROWS_AS(weight(two, quiet, cfg), AlignmentError);
}

TEST_CASE("weight denominators stay exact through the supported range") {
  for (int T = 1; T <= WeightWindowConfig::kMaxWindow; ++T) {
    WeightWindowConfig cfg;
    cfg.T = T;
    const std::int64_t d = cfg.denominator();
    for (int k = 2; k <= T + 1; ++k) CHECK(d % k == 0);
  }
  WeightWindowConfig too_big;
  too_big.T = WeightWindowConfig::kMaxWindow + 1;
  CHECK_THROWS_AS(too_big.validate(), InputError);
}

TEST_CASE("windows read nearest-first with zero padding and masking") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.bounded(20);
    const LabelSeries s = random_series(rng, n, 0.4, 0.2);
    const int T = 1 + static_cast<int>(rng.bounded(4));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(window_before(s, i, T) == oracle::window_before(s.values, s.mask, i, T));
      CHECK(window_after(s, i, T) == oracle::window_after(s.values, s.mask, i, T));
    }
  }
}

TEST_CASE("plain confusion matrix counts unmasked samples only") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.bounded(40);
    const LabelSeries actual = random_series(rng, n, 0.3, 0.25);
    const PredictionSeries pred = random_prediction(rng, n, 0.5);
    const ScoreTable got = confusion_matrix(actual, pred);
    const oracle::Table want = oracle::confusion(actual.values, actual.mask, pred.values);
    CHECK(got.tn == want.tn);
    CHECK(got.fp == want.fp);
    CHECK(got.fn == want.fn);
    CHECK(got.tp == want.tp);
  }
  PredictionSeries short_pred;
  short_pred.values = {1};
  CHECK_THROWS_AS(confusion_matrix(random_series(rng, 3, 0.5, 0.0), short_pred),
                  AlignmentError);
}

TEST_CASE("value-weighted matrix matches the brute-force scan") {
  Rng rng(13);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng.bounded(64);
    const LabelSeries actual = random_series(rng, n, 0.3, 0.15);
    const PredictionSeries pred = random_prediction(rng, n, 0.4);
    WeightWindowConfig cfg;
    cfg.T = 1 + static_cast<int>(rng.bounded(4));
    const ScoreTable got = value_weighted_confusion_matrix(actual, pred, cfg);
    const oracle::Table want =
        oracle::value_weighted(actual.values, actual.mask, pred.values, cfg.T);
    CHECK(got.tn == want.tn);
    CHECK(got.tp == want.tp);
    CHECK(got.fp == doctest::Approx(want.fp).epsilon(1e-12));
    CHECK(got.fn == doctest::Approx(want.fn).epsilon(1e-12));
  }
}

TEST_CASE("anticipating alarms cost less than isolated ones") {
  // One false alarm two hours before a real hit versus one in quiet air.
  const LabelSeries actual = LabelSeries::hourly({0, 0, 0, 0, 1, 0, 0, 0});
  PredictionSeries near_miss;
  near_miss.values = {0, 0, 1, 0, 1, 0, 0, 0};
  PredictionSeries lone;
  lone.values = {1, 0, 0, 0, 1, 0, 0, 0};
  WeightWindowConfig cfg;
  cfg.T = 3;
  const ScoreTable a = value_weighted_confusion_matrix(actual, near_miss, cfg);
  const ScoreTable b = value_weighted_confusion_matrix(actual, lone, cfg);
  CHECK(a.fp < b.fp);
  CHECK(a.fp == doctest::Approx(1.0 - 1.0 / 3.0));
  CHECK(b.fp == doctest::Approx(2.0));
}

TEST_CASE("missed events preceded by alarms cost less") {
  const LabelSeries actual = LabelSeries::hourly({0, 0, 0, 1, 0, 0});
  PredictionSeries early;
  early.values = {0, 0, 1, 0, 0, 0};
  PredictionSeries silent;
  silent.values = {0, 0, 0, 0, 0, 0};
  WeightWindowConfig cfg;
  cfg.T = 3;
  const ScoreTable a = value_weighted_confusion_matrix(actual, early, cfg);
  const ScoreTable b = value_weighted_confusion_matrix(actual, silent, cfg);
  CHECK(a.fn < b.fn);
  CHECK(a.fn == doctest::Approx(0.5));
  CHECK(b.fn == doctest::Approx(2.0));
}

TEST_CASE("scores and their undefined conditions") {
  CHECK(tss(ScoreTable{5, 0, 0, 5}) == doctest::Approx(1.0));
  CHECK(tss(ScoreTable{0, 5, 5, 0}) == doctest::Approx(-1.0));
  CHECK(csi(ScoreTable{5, 0, 0, 5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(tss(ScoreTable{5, 1, 0, 0}), UndefinedScoreError);  // no positives
  CHECK_THROWS_AS(tss(ScoreTable{0, 0, 1, 5}), UndefinedScoreError);  // no negatives
  CHECK_THROWS_AS(csi(ScoreTable{7, 0, 0, 0}), UndefinedScoreError);
  CHECK(csi(ScoreTable{0, 1, 0, 0}) == doctest::Approx(0.0));

  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.bounded(30);
    const LabelSeries actual = random_series(rng, n, 0.4, 0.1);
    const PredictionSeries pred = random_prediction(rng, n, 0.5);
    const ScoreTable t = confusion_matrix(actual, pred);
    const oracle::Table o{t.tn, t.fp, t.fn, t.tp};
    const auto want_tss = oracle::tss(o);
    const auto want_csi = oracle::csi(o);
    if (want_tss) {
      const double v = tss(t);
      CHECK(v == doctest::Approx(*want_tss).epsilon(1e-12));
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    } else {
      CHECK_THROWS_AS(tss(t), UndefinedScoreError);
    }
    if (want_csi) {
      const double v = csi(t);
      CHECK(v == doctest::Approx(*want_csi).epsilon(1e-12));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    } else {
      CHECK_THROWS_AS(csi(t), UndefinedScoreError);
    }
  }
}

TEST_CASE("score table dispatch picks the matching matrix") {
  Rng rng(15);
  const LabelSeries actual = random_series(rng, 40, 0.3, 0.0);
  const PredictionSeries pred = random_prediction(rng, 40, 0.4);
  WeightWindowConfig cfg;
  cfg.T = 2;
  const ScoreTable plain = confusion_matrix(actual, pred);
  const ScoreTable weighted = value_weighted_confusion_matrix(actual, pred, cfg);
  const ScoreTable via_tss = score_table(actual, pred, Score::tss, cfg);
  const ScoreTable via_wtss = score_table(actual, pred, Score::wtss, cfg);
  CHECK(via_tss.fp == plain.fp);
  CHECK(via_tss.fn == plain.fn);
  CHECK(via_wtss.fp == weighted.fp);
  CHECK(via_wtss.fn == weighted.fn);
  CHECK(score_series(actual, pred, Score::csi, cfg) ==
        doctest::Approx(csi(plain)));
  CHECK(score_series(actual, pred, Score::wcsi, cfg) ==
        doctest::Approx(wcsi(weighted)));
}

TEST_CASE("score names round-trip and reject junk") {
  CHECK(parse_score("tss") == Score::tss);
  CHECK(parse_score("wcsi") == Score::wcsi);
  CHECK(score_name(Score::wtss) == "wtss");
  CHECK(is_value_weighted(Score::wtss));
  CHECK(is_value_weighted(Score::wcsi));
  CHECK(!is_value_weighted(Score::tss));
  CHECK(!is_value_weighted(Score::csi));
  CHECK_THROWS_AS(parse_score("brier"), InputError);
}

TEST_CASE("masked samples influence neither counts nor weights") {
  // Masking the only actual positive turns its window reading to zero.
  LabelSeries actual = LabelSeries::hourly({0, 1, 0, 0});
  actual.mask = {1, 0, 1, 1};
  PredictionSeries pred;
  pred.values = {0, 0, 1, 0};
  WeightWindowConfig cfg;
  cfg.T = 2;
  const ScoreTable t = value_weighted_confusion_matrix(actual, pred, cfg);
  CHECK(t.tp == 0);
  CHECK(t.fn == 0);
  // The alarm at index 2 sees an all-quiet actual neighborhood.
  CHECK(t.fp == doctest::Approx(2.0));
}
