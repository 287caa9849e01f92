#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "stormwarn/ensemble.hpp"
#include "stormwarn/labeling.hpp"
#include "stormwarn/series.hpp"
#include "stormwarn/train.hpp"
#include "stormwarn/verify.hpp"

namespace stormwarn::io {

// FNV-1a 64 over the canonical (key-sorted) JSON dump, as 16 hex digits.
// Reordering keys in a config file cannot change the digest.
std::string config_digest(const nlohmann::json& config);

// First line of every CSV output; readers skip '#' lines.
std::string output_header(const std::string& digest);

// Shortest round-trip decimal form (%.17g).
std::string format_double(double v);

// "manifest" object embedded in JSON outputs.
nlohmann::json manifest_json(const std::string& digest);

// --- label/prediction series: timestamp,value,mask[,rain_only] ---
struct LabelSeriesFile {
  LabelSeries series;
  std::vector<std::uint8_t> rain_only;  // empty when the column is absent
};

void write_label_series(const std::filesystem::path& path,
                        const LabelSeries& series,
                        std::span<const std::uint8_t> rain_only,
                        const std::string& digest);
LabelSeriesFile read_label_series(const std::filesystem::path& path);

// --- lightning strikes: timestamp,lat,lon (microsecond timestamps) ---
void write_strikes(const std::filesystem::path& path,
                   std::span<const LightningRecord> strikes,
                   const std::string& digest);
std::vector<LightningRecord> read_strikes(const std::filesystem::path& path);

// --- rain grids: row,col,value CSV or row-major f32 binary, JSON sidecar ---
void write_rain_grid_csv(const std::filesystem::path& csv_path,
                         const std::filesystem::path& sidecar_path,
                         const RainGrid& grid, const std::string& digest);
RainGrid read_rain_grid_csv(const std::filesystem::path& csv_path,
                            const std::filesystem::path& sidecar_path);
void write_rain_grid_binary(const std::filesystem::path& bin_path,
                            const std::filesystem::path& sidecar_path,
                            const RainGrid& grid, const std::string& digest);
RainGrid read_rain_grid_binary(const std::filesystem::path& bin_path,
                               const std::filesystem::path& sidecar_path);

// --- epoch matrices: sample_id,epoch_1,...,epoch_N ---
struct EpochMatrixFile {
  EpochMatrix matrix;
  std::vector<std::int64_t> sample_ids;
};

void write_epoch_matrix(const std::filesystem::path& path,
                        const EpochMatrix& matrix, std::int64_t first_sample_id,
                        const std::string& digest);
EpochMatrixFile read_epoch_matrix(const std::filesystem::path& path);

// Manifest tying a label stream to per-run per-split matrix files.
struct MatrixManifest {
  int runs = 0;    // M
  int epochs = 0;  // N
  std::uint64_t seed = 0;
  std::string labels_path;
  std::size_t train_begin = 0, train_end = 0;
  std::size_t validation_begin = 0, validation_end = 0;
  std::size_t test_begin = 0, test_end = 0;
  // files[k] holds {train, validation, test} paths for run k (0-based).
  struct RunFiles {
    std::string train, validation, test;
  };
  std::vector<RunFiles> files;
  // Free-form producer settings (training hyperparameters etc.). Optional.
  nlohmann::json config = nlohmann::json::object();
  void validate() const;
};

void write_matrix_manifest(const std::filesystem::path& path,
                           const MatrixManifest& manifest,
                           const std::string& digest);
MatrixManifest read_matrix_manifest(const std::filesystem::path& path);

// --- features: timestamp,f1,...,fD ---
struct FeatureFile {
  Eigen::MatrixXd features;
  std::vector<std::int64_t> timestamps;
};

void write_features(const std::filesystem::path& path,
                    const Eigen::MatrixXd& features,
                    std::span<const std::int64_t> timestamps,
                    const std::string& digest);
FeatureFile read_features(const std::filesystem::path& path);

// --- ensemble decision JSON ---
struct DecisionFile {
  EnsembleDecision decision;
  std::string selection_score;
  std::string run_score;
  int window_T = 0;
};

void write_decision(const std::filesystem::path& path, const DecisionFile& file,
                    const std::string& digest);
DecisionFile read_decision(const std::filesystem::path& path);

// --- score report JSON: tn,fp,fn,tp,tss,csi,wfp,wfn,wtss,wcsi,T ---
// Undefined scores serialize as null.
nlohmann::json score_report_json(const ScoreTable& plain,
                                 const ScoreTable& weighted, int window_T);
void write_score_report(const std::filesystem::path& path,
                        const ScoreTable& plain, const ScoreTable& weighted,
                        int window_T, const std::string& digest);

// --- timeline CSV: timestamp,actual,rain_only,predicted,masked ---
void write_timeline(const std::filesystem::path& path, const LabelSeries& actual,
                    std::span<const std::uint8_t> rain_only,
                    const PredictionSeries& predicted,
                    const std::string& digest);

// --- toy-classifier parameter snapshots: f64 blocks + JSON manifest ---
void write_param_snapshots(const std::filesystem::path& bin_path,
                           const std::filesystem::path& manifest_path,
                           std::span<const ToyClassifierParams> snapshots,
                           std::uint64_t seed, const std::string& digest);
std::vector<ToyClassifierParams> read_param_snapshots(
    const std::filesystem::path& bin_path,
    const std::filesystem::path& manifest_path);

}  // namespace stormwarn::io
