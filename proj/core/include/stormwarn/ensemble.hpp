#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stormwarn/series.hpp"
#include "stormwarn/verify.hpp"

namespace stormwarn {

// Per-epoch probability outputs of one run on one split, epoch-major.
struct EpochMatrix {
  std::vector<std::vector<double>> probs;  // [epoch][sample], values in [0,1]

  std::size_t n_epochs() const { return probs.size(); }
  std::size_t n_samples() const { return probs.empty() ? 0 : probs.front().size(); }
  void validate() const;  // rectangular, all values in [0,1]
};

enum class Split { train, validation, test };
std::string_view split_name(Split s);

struct RunSplits {
  EpochMatrix train;
  EpochMatrix validation;
  EpochMatrix test;

  void validate() const;  // same epoch count everywhere
};

struct SplitLabels {
  LabelSeries train;
  LabelSeries validation;
  LabelSeries test;
};

// Candidate levels gamma in [start, stop) walked by step.
struct GammaGrid {
  double start = 0.80;
  double stop = 0.99;
  double step = 0.01;

  void validate() const;
  std::vector<double> values() const;
};

struct ThresholdGrid {
  enum class Kind { unique_probs, uniform };
  Kind kind = Kind::unique_probs;
  int uniform_count = 101;  // candidates j/count, j = 0..count-1

  void validate() const;
};

struct EnsembleConfig {
  int epochs = 0;  // N; 0 means take it from the data
  int runs = 0;    // M; 0 means take it from the data
  WeightWindowConfig window;
  Score selection_score = Score::tss;  // S: thresholds, epoch selection, gamma
  Score run_score = Score::tss;        // S': picks the run
  GammaGrid gamma_grid;
  ThresholdGrid threshold_grid;

  void validate() const;
};

// 1 where prob > tau (strict), 0 otherwise.
PredictionSeries binarize(std::span<const double> probs, double tau);

// Smallest tau from the candidate grid maximizing the score of the
// binarized prediction against the actual labels. Candidates are {0} plus
// the sorted unique probability values (or a uniform grid). Throws
// UndefinedScoreError when no candidate yields a defined score.
double optimal_threshold(std::span<const double> probs, const LabelSeries& actual,
                         Score s, const WeightWindowConfig& window,
                         const ThresholdGrid& grid = {});

// { j : scores[j] > alpha }, 0-based ascending. NaN entries (undefined
// scores) never qualify. An empty result is legal; callers decide.
std::vector<int> select_epochs(std::span<const double> scores, double alpha);

// Majority value; exact ties return 1. Throws InputError on empty votes.
std::uint8_t median_vote(std::span<const std::uint8_t> votes);

// Per-sample median vote over the selected epochs' binarized predictions.
// epoch_set is treated as a set: duplicates are ignored.
PredictionSeries ensemble_predict(const EpochMatrix& probs,
                                  std::span<const double> thresholds,
                                  std::span<const int> epoch_set);

struct GammaChoice {
  double gamma = 0.0;
  double alpha = 0.0;
  std::vector<int> epochs;  // J at the chosen level, 0-based
};

// Automatic level choice: for each grid gamma, alpha = gamma * max_j S_j on
// validation, epochs above alpha vote, and the gamma whose validation
// ensemble scores best wins (ties toward the smallest gamma). Gammas with an
// empty epoch set are skipped; if every gamma is skipped this throws
// UndefinedScoreError.
GammaChoice tune_gamma(const EpochMatrix& val_probs,
                       std::span<const double> thresholds,
                       const LabelSeries& val_labels, const EnsembleConfig& cfg);

struct RunEvaluation {
  std::vector<double> thresholds;         // per epoch, from the training split
  std::vector<double> validation_scores;  // per epoch S on validation; NaN = undefined
  GammaChoice level;
  PredictionSeries validation_prediction;
  double validation_run_score = 0.0;  // S' of the validation ensemble
  bool run_score_defined = false;
};

RunEvaluation evaluate_run(const RunSplits& run, const SplitLabels& labels,
                           const EnsembleConfig& cfg);

struct EnsembleDecision {
  int chosen_run = 0;              // 0-based
  std::vector<double> thresholds;  // per epoch of the chosen run
  std::vector<int> epochs;         // J, 0-based, nonempty
  double alpha = 0.0;
  double gamma = 0.0;
  double validation_run_score = 0.0;
  PredictionSeries test_prediction;
  std::vector<std::int64_t> test_timestamps;
};

// Full strategy: per-run thresholds on training labels, gamma tuned on
// validation, run with the best S' validation ensemble wins (ties toward
// the smallest run index). Throws UndefinedScoreError when no run yields a
// defined S'.
EnsembleDecision select_run(std::span<const RunSplits> runs,
                            const SplitLabels& labels, const EnsembleConfig& cfg);

}  // namespace stormwarn
