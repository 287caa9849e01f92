#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stormwarn/series.hpp"

namespace stormwarn {

enum class EdgePolicy { pad_zero };

// Window configuration for the value-weighted confusion matrix. The weight
// vector is (1/2, 1/3, ..., 1/(T+1)).
struct WeightWindowConfig {
  int T = 3;
  EdgePolicy edge_policy = EdgePolicy::pad_zero;

  void validate() const;  // 1 <= T <= kMaxWindow
  std::vector<double> w_vec() const;

  // All weights are integer multiples of 1/denominator(); see weight_scaled.
  std::int64_t denominator() const;

  // lcm(2..T+1) overflows int64 past this.
  static constexpr int kMaxWindow = 24;
};

// Generalized confusion table. Entries are integral counts in the
// quality-based case and nonnegative reals in the value-weighted case.
struct ScoreTable {
  double tn = 0;
  double fp = 0;
  double fn = 0;
  double tp = 0;
};

enum class Score { tss, csi, wtss, wcsi };

bool is_value_weighted(Score s);
std::string_view score_name(Score s);
Score parse_score(std::string_view name);  // throws InputError

// Quality-based confusion matrix over unmasked indices. Throws
// AlignmentError when the series lengths differ.
ScoreTable confusion_matrix(const LabelSeries& actual,
                            const PredictionSeries& predicted);

// TP/(TP+FN) - FP/(FP+TN), in [-1, 1]. Throws UndefinedScoreError when a
// class is empty.
double tss(const ScoreTable& table);

// TP/(TP+FP+FN), in [0, 1]. Throws UndefinedScoreError when all relevant
// entries are zero.
double csi(const ScoreTable& table);

// Same formulas applied to a value-weighted table.
double wtss(const ScoreTable& table);
double wcsi(const ScoreTable& table);

double score_value(Score s, const ScoreTable& table);

// The T values before/after index i, nearest first: (v[i-1], ..., v[i-T])
// and (v[i+1], ..., v[i+T]). Positions outside the series, and masked
// positions, read as zero.
std::vector<std::uint8_t> window_before(std::span<const std::uint8_t> values,
                                        std::span<const std::uint8_t> mask,
                                        std::size_t i, int T);
std::vector<std::uint8_t> window_after(std::span<const std::uint8_t> values,
                                       std::span<const std::uint8_t> mask,
                                       std::size_t i, int T);
std::vector<std::uint8_t> window_before(const LabelSeries& s, std::size_t i, int T);
std::vector<std::uint8_t> window_after(const LabelSeries& s, std::size_t i, int T);

// Error weight for one mistake given its surrounding windows s and t:
// 2 when both windows are all-zero, otherwise 1 - max(w_vec o t). Only the
// second argument matters outside the all-zero branch. Throws
// AlignmentError unless |s| = |t| = T.
double weight(std::span<const std::uint8_t> s, std::span<const std::uint8_t> t,
              const WeightWindowConfig& cfg);

// Same value as an exact integer numerator over cfg.denominator(). Sums of
// these are order-independent, which keeps threshold sweeps bit-identical
// to direct evaluation.
std::int64_t weight_scaled(std::span<const std::uint8_t> s,
                           std::span<const std::uint8_t> t,
                           const WeightWindowConfig& cfg);

// Confusion matrix with FP/FN replaced by their value-weighted sums: each
// false alarm is weighted by w(z-, z+) over the actual-label windows, each
// miss by w(zhat+, zhat-) over the predicted-label windows.
ScoreTable value_weighted_confusion_matrix(const LabelSeries& actual,
                                           const PredictionSeries& predicted,
                                           const WeightWindowConfig& cfg);

// Quality table for tss/csi, value-weighted table for wtss/wcsi.
ScoreTable score_table(const LabelSeries& actual, const PredictionSeries& predicted,
                       Score s, const WeightWindowConfig& cfg);
double score_series(const LabelSeries& actual, const PredictionSeries& predicted,
                    Score s, const WeightWindowConfig& cfg);

namespace detail {

// Exact FP weight numerator at index i from the actual labels (masked reads
// are zero). The result never depends on the prediction sequence.
std::int64_t fp_weight_scaled_at(std::span<const std::uint8_t> actual,
                                 std::span<const std::uint8_t> mask,
                                 std::size_t i, const WeightWindowConfig& cfg);

// Exact FN weight numerator at index i from the predicted labels.
std::int64_t fn_weight_scaled_at(std::span<const std::uint8_t> predicted,
                                 std::span<const std::uint8_t> mask,
                                 std::size_t i, const WeightWindowConfig& cfg);

double scaled_to_double(std::int64_t numerator, std::int64_t denominator);

}  // namespace detail

}  // namespace stormwarn
