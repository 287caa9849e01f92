#include "stormwarn/verify.hpp"

#include <numeric>
#include <string>

#include "stormwarn/errors.hpp"

namespace stormwarn {

void WeightWindowConfig::validate() const {
  if (T < 1) throw InputError("window length T must be >= 1");
  if (T > kMaxWindow)
    throw InputError("window length T must be <= " + std::to_string(kMaxWindow));
}

std::vector<double> WeightWindowConfig::w_vec() const {
  validate();
  std::vector<double> w(static_cast<std::size_t>(T));
  for (int k = 0; k < T; ++k) w[static_cast<std::size_t>(k)] = 1.0 / (k + 2);
  return w;
}

std::int64_t WeightWindowConfig::denominator() const {
  validate();
  std::int64_t d = 1;
  for (int k = 2; k <= T + 1; ++k) d = std::lcm(d, static_cast<std::int64_t>(k));
  return d;
}

bool is_value_weighted(Score s) { return s == Score::wtss || s == Score::wcsi; }

std::string_view score_name(Score s) {
  switch (s) {
    case Score::tss: return "tss";
    case Score::csi: return "csi";
    case Score::wtss: return "wtss";
    case Score::wcsi: return "wcsi";
  }
  return "?";
}

Score parse_score(std::string_view name) {
  if (name == "tss") return Score::tss;
  if (name == "csi") return Score::csi;
  if (name == "wtss") return Score::wtss;
  if (name == "wcsi") return Score::wcsi;
  throw InputError("unknown score '" + std::string(name) +
                   "' (expected tss|csi|wtss|wcsi)");
}

namespace {

void check_aligned(const LabelSeries& actual, const PredictionSeries& predicted) {
  if (actual.size() != predicted.size())
    throw AlignmentError("actual series has " + std::to_string(actual.size()) +
                         " samples, prediction has " +
                         std::to_string(predicted.size()));
}

// Masked positions read as zero everywhere inside windows.
inline std::uint8_t effective(std::span<const std::uint8_t> values,
                              std::span<const std::uint8_t> mask, std::size_t j) {
  if (!mask.empty() && !mask[j]) return 0;
  return values[j];
}

}  // namespace

ScoreTable confusion_matrix(const LabelSeries& actual,
                            const PredictionSeries& predicted) {
  check_aligned(actual, predicted);
  ScoreTable t;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!actual.mask[i]) continue;
    const bool y = actual.values[i] != 0;
    const bool yhat = predicted.values[i] != 0;
    if (y && yhat)
      t.tp += 1;
    else if (!y && !yhat)
      t.tn += 1;
    else if (!y && yhat)
      t.fp += 1;
    else
      t.fn += 1;
  }
  return t;
}

double tss(const ScoreTable& t) {
  if (t.tp + t.fn == 0 || t.fp + t.tn == 0)
    throw UndefinedScoreError("TSS undefined: one class is empty");
  return t.tp / (t.tp + t.fn) - t.fp / (t.fp + t.tn);
}

double csi(const ScoreTable& t) {
  if (t.tp + t.fp + t.fn == 0)
    throw UndefinedScoreError("CSI undefined: TP, FP and FN are all zero");
  return t.tp / (t.tp + t.fp + t.fn);
}

double wtss(const ScoreTable& t) { return tss(t); }

double wcsi(const ScoreTable& t) { return csi(t); }

double score_value(Score s, const ScoreTable& table) {
  switch (s) {
    case Score::tss: return tss(table);
    case Score::csi: return csi(table);
    case Score::wtss: return wtss(table);
    case Score::wcsi: return wcsi(table);
  }
  throw InputError("unreachable score kind");
}

std::vector<std::uint8_t> window_before(std::span<const std::uint8_t> values,
                                        std::span<const std::uint8_t> mask,
                                        std::size_t i, int T) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(T), 0);
  for (int k = 1; k <= T; ++k) {
    if (static_cast<std::size_t>(k) > i) break;  // pad_zero past the start
    out[static_cast<std::size_t>(k - 1)] = effective(values, mask, i - k);
  }
  return out;
}

std::vector<std::uint8_t> window_after(std::span<const std::uint8_t> values,
                                       std::span<const std::uint8_t> mask,
                                       std::size_t i, int T) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(T), 0);
  for (int k = 1; k <= T; ++k) {
    const std::size_t j = i + static_cast<std::size_t>(k);
    if (j >= values.size()) break;
    out[static_cast<std::size_t>(k - 1)] = effective(values, mask, j);
  }
  return out;
}

std::vector<std::uint8_t> window_before(const LabelSeries& s, std::size_t i, int T) {
  return window_before(s.values, s.mask, i, T);
}

std::vector<std::uint8_t> window_after(const LabelSeries& s, std::size_t i, int T) {
  return window_after(s.values, s.mask, i, T);
}

double weight(std::span<const std::uint8_t> s, std::span<const std::uint8_t> t,
              const WeightWindowConfig& cfg) {
  cfg.validate();
  const std::size_t T = static_cast<std::size_t>(cfg.T);
  if (s.size() != T || t.size() != T)
    throw AlignmentError("weight: windows must both have length T");
  bool all_zero = true;
  for (std::size_t k = 0; k < T && all_zero; ++k)
    if (s[k] || t[k]) all_zero = false;
  if (all_zero) return 2.0;
  double m = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    const double wk = t[k] ? 1.0 / (static_cast<double>(k) + 2.0) : 0.0;
    if (wk > m) m = wk;
  }
  return 1.0 - m;
}

std::int64_t weight_scaled(std::span<const std::uint8_t> s,
                           std::span<const std::uint8_t> t,
                           const WeightWindowConfig& cfg) {
  const std::int64_t d = cfg.denominator();
  const std::size_t T = static_cast<std::size_t>(cfg.T);
  if (s.size() != T || t.size() != T)
    throw AlignmentError("weight: windows must both have length T");
  int first_t = -1;
  bool s_any = false;
  for (std::size_t k = 0; k < T; ++k) {
    if (t[k] && first_t < 0) first_t = static_cast<int>(k);
    if (s[k]) s_any = true;
  }
  if (!s_any && first_t < 0) return 2 * d;
  if (first_t < 0) return d;  // max over empty support is 0
  return d - d / (first_t + 2);
}

namespace detail {

std::int64_t fp_weight_scaled_at(std::span<const std::uint8_t> actual,
                                 std::span<const std::uint8_t> mask,
                                 std::size_t i, const WeightWindowConfig& cfg) {
  const std::int64_t d = cfg.denominator();
  const int T = cfg.T;
  bool before_any = false;
  for (int k = 1; k <= T; ++k) {
    if (static_cast<std::size_t>(k) > i) break;
    if (effective(actual, mask, i - k)) {
      before_any = true;
      break;
    }
  }
  int first_after = -1;
  for (int k = 1; k <= T; ++k) {
    const std::size_t j = i + static_cast<std::size_t>(k);
    if (j >= actual.size()) break;
    if (effective(actual, mask, j)) {
      first_after = k - 1;
      break;
    }
  }
  if (!before_any && first_after < 0) return 2 * d;
  if (first_after < 0) return d;
  return d - d / (first_after + 2);
}

std::int64_t fn_weight_scaled_at(std::span<const std::uint8_t> predicted,
                                 std::span<const std::uint8_t> mask,
                                 std::size_t i, const WeightWindowConfig& cfg) {
  // w(zhat+, zhat-): the max runs over the *before* window.
  const std::int64_t d = cfg.denominator();
  const int T = cfg.T;
  bool after_any = false;
  for (int k = 1; k <= T; ++k) {
    const std::size_t j = i + static_cast<std::size_t>(k);
    if (j >= predicted.size()) break;
    if (effective(predicted, mask, j)) {
      after_any = true;
      break;
    }
  }
  int first_before = -1;
  for (int k = 1; k <= T; ++k) {
    if (static_cast<std::size_t>(k) > i) break;
    if (effective(predicted, mask, i - k)) {
      first_before = k - 1;
      break;
    }
  }
  if (!after_any && first_before < 0) return 2 * d;
  if (first_before < 0) return d;
  return d - d / (first_before + 2);
}

double scaled_to_double(std::int64_t numerator, std::int64_t denominator) {
  // Split so both parts convert exactly even when the numerator exceeds 2^53.
  const std::int64_t q = numerator / denominator;
  const std::int64_t r = numerator % denominator;
  return static_cast<double>(q) +
         static_cast<double>(r) / static_cast<double>(denominator);
}

}  // namespace detail

ScoreTable value_weighted_confusion_matrix(const LabelSeries& actual,
                                           const PredictionSeries& predicted,
                                           const WeightWindowConfig& cfg) {
  check_aligned(actual, predicted);
  const std::int64_t d = cfg.denominator();
  ScoreTable t;
  std::int64_t wfp_num = 0, wfn_num = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!actual.mask[i]) continue;
    const bool y = actual.values[i] != 0;
    const bool yhat = predicted.values[i] != 0;
    if (y && yhat) {
      t.tp += 1;
    } else if (!y && !yhat) {
      t.tn += 1;
    } else if (!y && yhat) {
      wfp_num += detail::fp_weight_scaled_at(actual.values, actual.mask, i, cfg);
    } else {
      wfn_num += detail::fn_weight_scaled_at(predicted.values, actual.mask, i, cfg);
    }
  }
  t.fp = detail::scaled_to_double(wfp_num, d);
  t.fn = detail::scaled_to_double(wfn_num, d);
  return t;
}

ScoreTable score_table(const LabelSeries& actual, const PredictionSeries& predicted,
                       Score s, const WeightWindowConfig& cfg) {
  return is_value_weighted(s) ? value_weighted_confusion_matrix(actual, predicted, cfg)
                              : confusion_matrix(actual, predicted);
}

double score_series(const LabelSeries& actual, const PredictionSeries& predicted,
                    Score s, const WeightWindowConfig& cfg) {
  return score_value(s, score_table(actual, predicted, s, cfg));
}

}  // namespace stormwarn
