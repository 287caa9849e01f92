#include "stormwarn/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "stormwarn/errors.hpp"

namespace stormwarn {

void EpochMatrix::validate() const {
  for (const auto& row : probs) {
    if (row.size() != n_samples())
      throw InputError("epoch matrix is ragged: epochs cover different sample sets");
    for (double p : row)
      if (!(p >= 0.0 && p <= 1.0))
        throw InputError("epoch matrix probabilities must lie in [0,1]");
  }
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "?";
}

void RunSplits::validate() const {
  train.validate();
  validation.validate();
  test.validate();
  if (train.n_epochs() == 0) throw InputError("run has no epochs");
  if (validation.n_epochs() != train.n_epochs() ||
      test.n_epochs() != train.n_epochs())
    throw InputError("run splits disagree on the number of epochs");
}

void GammaGrid::validate() const {
  if (!(0.0 < start && start < stop && stop < 1.0))
    throw InputError("gamma grid needs 0 < start < stop < 1");
  if (!(step > 0.0)) throw InputError("gamma grid step must be positive");
}

std::vector<double> GammaGrid::values() const {
  validate();
  std::vector<double> out;
  for (int m = 0;; ++m) {
    const double g = start + m * step;
    if (g >= stop - 1e-12) break;
    out.push_back(g);
  }
  return out;
}

void ThresholdGrid::validate() const {
  if (kind == Kind::uniform && uniform_count < 1)
    throw InputError("uniform threshold grid needs at least one candidate");
}

void EnsembleConfig::validate() const {
  if (epochs < 0 || runs < 0)
    throw InputError("epoch and run counts cannot be negative");
  window.validate();
  gamma_grid.validate();
  threshold_grid.validate();
}

PredictionSeries binarize(std::span<const double> probs, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw InputError("binarization threshold must lie in [0,1]");
  PredictionSeries out;
  out.values.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    out.values[i] = probs[i] > tau ? 1 : 0;
  return out;
}

double optimal_threshold(std::span<const double> probs, const LabelSeries& actual,
                         Score s, const WeightWindowConfig& window,
                         const ThresholdGrid& grid) {
  if (probs.size() != actual.size())
    throw AlignmentError("probabilities and labels have different lengths");
  window.validate();
  grid.validate();
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0))
      throw InputError("probabilities must lie in [0,1]");

  const std::size_t n = probs.size();

  std::vector<double> candidates;
  if (grid.kind == ThresholdGrid::Kind::unique_probs) {
    candidates.assign(probs.begin(), probs.end());
    candidates.push_back(0.0);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
  } else {
    candidates.reserve(static_cast<std::size_t>(grid.uniform_count));
    for (int j = 0; j < grid.uniform_count; ++j)
      candidates.push_back(static_cast<double>(j) / grid.uniform_count);
  }

  // Unmasked samples ordered by probability, highest first. Walking the
  // candidates downward flips each sample to predicted-positive exactly when
  // its probability first exceeds the candidate.
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (actual.mask[i]) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  });

  const bool weighted = is_value_weighted(s);
  const std::int64_t d = window.denominator();
  const int T = window.T;
  const auto pos = static_cast<std::int64_t>(actual.positives());
  const auto neg = static_cast<std::int64_t>(actual.negatives());

  std::int64_t tp = 0, fp = 0;
  std::int64_t wfp_num = 0, wfn_num = 0;
  std::vector<std::uint8_t> pred(n, 0);
  std::vector<std::int64_t> fp_weight;

  if (weighted) {
    // FP weights depend only on the actual labels; cache them. The initial
    // all-negative prediction makes every positive a miss.
    fp_weight.assign(n, 0);
    for (std::size_t i : order)
      if (!actual.values[i])
        fp_weight[i] =
            detail::fp_weight_scaled_at(actual.values, actual.mask, i, window);
    for (std::size_t i = 0; i < n; ++i)
      if (actual.mask[i] && actual.values[i])
        wfn_num += detail::fn_weight_scaled_at(pred, actual.mask, i, window);
  }

  auto flip_to_positive = [&](std::size_t idx) {
    if (weighted) {
      if (actual.values[idx])
        wfn_num -= detail::fn_weight_scaled_at(pred, actual.mask, idx, window);
      // Misses within T of idx see their before/after windows change.
      const std::size_t lo = idx >= static_cast<std::size_t>(T)
                                 ? idx - static_cast<std::size_t>(T)
                                 : 0;
      const std::size_t hi = std::min(n - 1, idx + static_cast<std::size_t>(T));
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == idx || !actual.mask[j] || !actual.values[j] || pred[j]) continue;
        wfn_num -= detail::fn_weight_scaled_at(pred, actual.mask, j, window);
      }
      pred[idx] = 1;
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == idx || !actual.mask[j] || !actual.values[j] || pred[j]) continue;
        wfn_num += detail::fn_weight_scaled_at(pred, actual.mask, j, window);
      }
      if (!actual.values[idx]) wfp_num += fp_weight[idx];
    } else {
      pred[idx] = 1;
    }
    if (actual.values[idx])
      tp += 1;
    else
      fp += 1;
  };

  bool have = false;
  double best_score = 0.0, best_tau = 0.0;
  std::size_t next = 0;
  for (std::size_t ci = candidates.size(); ci-- > 0;) {
    const double tau = candidates[ci];
    while (next < order.size() && probs[order[next]] > tau) {
      flip_to_positive(order[next]);
      ++next;
    }
    ScoreTable t;
    t.tp = static_cast<double>(tp);
    t.tn = static_cast<double>(neg - fp);
    if (weighted) {
      t.fp = detail::scaled_to_double(wfp_num, d);
      t.fn = detail::scaled_to_double(wfn_num, d);
    } else {
      t.fp = static_cast<double>(fp);
      t.fn = static_cast<double>(pos - tp);
    }
    const bool defined = (s == Score::tss || s == Score::wtss)
                             ? (t.tp + t.fn) > 0 && (t.fp + t.tn) > 0
                             : (t.tp + t.fp + t.fn) > 0;
    if (!defined) continue;
    const double v = score_value(s, t);
    // >= so that equal scores hand the win to the smaller tau.
    if (!have || v >= best_score) {
      have = true;
      best_score = v;
      best_tau = tau;
    }
  }
  if (!have)
    throw UndefinedScoreError("no threshold yields a defined " +
                              std::string(score_name(s)));
  return best_tau;
}

std::vector<int> select_epochs(std::span<const double> scores, double alpha) {
  std::vector<int> out;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (scores[j] > alpha) out.push_back(static_cast<int>(j));
  return out;
}

std::uint8_t median_vote(std::span<const std::uint8_t> votes) {
  if (votes.empty()) throw InputError("median vote over an empty vote set");
  std::size_t ones = 0;
  for (auto v : votes) ones += v != 0;
  return 2 * ones >= votes.size() ? 1 : 0;
}

PredictionSeries ensemble_predict(const EpochMatrix& probs,
                                  std::span<const double> thresholds,
                                  std::span<const int> epoch_set) {
  if (thresholds.size() != probs.n_epochs())
    throw AlignmentError("one threshold per epoch is required");
  std::vector<int> selected(epoch_set.begin(), epoch_set.end());
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  if (selected.empty())
    throw InputError("ensemble prediction needs a nonempty epoch set");
  for (int j : selected)
    if (j < 0 || static_cast<std::size_t>(j) >= probs.n_epochs())
      throw InputError("epoch index " + std::to_string(j) + " out of range");

  const std::size_t n = probs.n_samples();
  PredictionSeries out;
  out.values.assign(n, 0);
  std::vector<std::uint8_t> votes(selected.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < selected.size(); ++v) {
      const int j = selected[v];
      votes[v] =
          probs.probs[static_cast<std::size_t>(j)][i] > thresholds[static_cast<std::size_t>(j)]
              ? 1
              : 0;
    }
    out.values[i] = median_vote(votes);
  }
  return out;
}

namespace {

std::vector<double> epoch_validation_scores(const EpochMatrix& val_probs,
                                            std::span<const double> thresholds,
                                            const LabelSeries& val_labels,
                                            const EnsembleConfig& cfg) {
  std::vector<double> scores(val_probs.n_epochs(),
                             std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j < val_probs.n_epochs(); ++j) {
    const PredictionSeries pred = binarize(val_probs.probs[j], thresholds[j]);
    try {
      scores[j] =
          score_series(val_labels, pred, cfg.selection_score, cfg.window);
    } catch (const UndefinedScoreError&) {
      // stays NaN and never passes a level
    }
  }
  return scores;
}

}  // namespace

GammaChoice tune_gamma(const EpochMatrix& val_probs,
                       std::span<const double> thresholds,
                       const LabelSeries& val_labels, const EnsembleConfig& cfg) {
  cfg.validate();
  val_probs.validate();
  val_labels.validate();
  if (thresholds.size() != val_probs.n_epochs())
    throw AlignmentError("one threshold per epoch is required");
  if (val_probs.n_samples() != val_labels.size())
    throw AlignmentError("validation probabilities and labels differ in length");

  const std::vector<double> scores =
      epoch_validation_scores(val_probs, thresholds, val_labels, cfg);
  double max_score = -std::numeric_limits<double>::infinity();
  bool any_defined = false;
  for (double s : scores)
    if (!std::isnan(s)) {
      any_defined = true;
      max_score = std::max(max_score, s);
    }
  if (!any_defined)
    throw UndefinedScoreError("no epoch has a defined validation score");

  GammaChoice best;
  bool have = false;
  double best_score = 0.0;
  for (const double gamma : cfg.gamma_grid.values()) {
    const double alpha = gamma * max_score;
    std::vector<int> epochs = select_epochs(scores, alpha);
    if (epochs.empty()) continue;
    const PredictionSeries ens = ensemble_predict(val_probs, thresholds, epochs);
    double v;
    try {
      v = score_series(val_labels, ens, cfg.selection_score, cfg.window);
    } catch (const UndefinedScoreError&) {
      continue;
    }
    if (!have || v > best_score) {  // strict: ties keep the smallest gamma
      have = true;
      best_score = v;
      best.gamma = gamma;
      best.alpha = alpha;
      best.epochs = std::move(epochs);
    }
  }
  if (!have)
    throw UndefinedScoreError(
        "every gamma level was skipped (no usable epoch set)");
  return best;
}

RunEvaluation evaluate_run(const RunSplits& run, const SplitLabels& labels,
                           const EnsembleConfig& cfg) {
  cfg.validate();
  run.validate();
  labels.train.validate();
  labels.validation.validate();
  labels.test.validate();
  if (run.train.n_samples() != labels.train.size())
    throw AlignmentError("training probabilities and labels differ in length");
  if (run.validation.n_samples() != labels.validation.size())
    throw AlignmentError("validation probabilities and labels differ in length");
  if (run.test.n_samples() != labels.test.size())
    throw AlignmentError("test probabilities and labels differ in length");
  if (cfg.epochs > 0 &&
      run.train.n_epochs() != static_cast<std::size_t>(cfg.epochs))
    throw InputError("run epoch count does not match the configured N");

  RunEvaluation ev;
  const std::size_t n_epochs = run.train.n_epochs();
  ev.thresholds.reserve(n_epochs);
  for (std::size_t j = 0; j < n_epochs; ++j)
    ev.thresholds.push_back(optimal_threshold(run.train.probs[j], labels.train,
                                              cfg.selection_score, cfg.window,
                                              cfg.threshold_grid));
  ev.validation_scores =
      epoch_validation_scores(run.validation, ev.thresholds, labels.validation, cfg);
  ev.level = tune_gamma(run.validation, ev.thresholds, labels.validation, cfg);
  ev.validation_prediction =
      ensemble_predict(run.validation, ev.thresholds, ev.level.epochs);
  try {
    ev.validation_run_score = score_series(labels.validation,
                                           ev.validation_prediction,
                                           cfg.run_score, cfg.window);
    ev.run_score_defined = true;
  } catch (const UndefinedScoreError&) {
    ev.run_score_defined = false;
  }
  return ev;
}

EnsembleDecision select_run(std::span<const RunSplits> runs,
                            const SplitLabels& labels, const EnsembleConfig& cfg) {
  cfg.validate();
  if (runs.empty()) throw InputError("at least one run is required");
  if (cfg.runs > 0 && runs.size() != static_cast<std::size_t>(cfg.runs))
    throw InputError("run count does not match the configured M");

  int best_k = -1;
  std::optional<RunEvaluation> best_ev;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    RunEvaluation ev;
    try {
      ev = evaluate_run(runs[k], labels, cfg);
    } catch (const UndefinedScoreError&) {
      continue;
    }
    if (!ev.run_score_defined) continue;
    // strict: ties keep the smallest run index
    if (best_k < 0 || ev.validation_run_score > best_ev->validation_run_score) {
      best_k = static_cast<int>(k);
      best_ev = std::move(ev);
    }
  }
  if (best_k < 0)
    throw UndefinedScoreError("no run yields a defined run-selection score");

  EnsembleDecision decision;
  decision.chosen_run = best_k;
  decision.thresholds = best_ev->thresholds;
  decision.epochs = best_ev->level.epochs;
  decision.alpha = best_ev->level.alpha;
  decision.gamma = best_ev->level.gamma;
  decision.validation_run_score = best_ev->validation_run_score;
  decision.test_prediction =
      ensemble_predict(runs[static_cast<std::size_t>(best_k)].test,
                       best_ev->thresholds, best_ev->level.epochs);
  decision.test_timestamps = labels.test.timestamps;
  return decision;
}

}  // namespace stormwarn
