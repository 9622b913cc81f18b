#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flda/classify.hpp"
#include "flda/dataset.hpp"
#include "flda/synthetic.hpp"
#include "flda/transfer.hpp"

namespace flda {

struct BenchOptions {
  std::size_t repetitions = 50;
  std::vector<std::size_t> sizes = {10, 20, 50, 100, 200, 500, 1000};
  std::vector<double> deltas = {0.0, 0.1, 0.2, 0.3};
  std::size_t perturb_feature = 0;
  std::size_t validation_size = 10000;  // fixed evaluation sets
  std::size_t pool_size = 10000;        // learning-curve training pools
  std::size_t threads = 1;
  std::size_t scatter_points = 2000;  // per domain in boundary plots
  TrainConfig train;                  // l2 applies to the naive baselines only

  void validate() const;
};

/// Everything a config file may set. Sections: [synthetic] (see
/// read_spec), [bench], [train], [data].
struct DataOptions {
  DelimitedOptions delimited;
  bool sparse_format = false;  // "label idx:val" input instead of delimited
};

struct RunConfig {
  std::optional<SyntheticSpec> spec;
  BenchOptions bench;
  DataOptions data;
};

RunConfig load_config(const std::filesystem::path& path);

struct ErrorEntry {
  std::string classifier;
  std::string domain;  // "source" or "target"
  double error = 0.0;
};

struct CurvePoint {
  std::size_t size = 0;
  std::string classifier;
  std::string domain;
  double mean = 0.0;
  double sem = 0.0;
  std::size_t repetitions = 0;
};

struct TableRow {
  std::string label;
  std::vector<double> values;
};

/// Decision boundary w'x + b = 0 of a binary classifier, kept for plotting.
struct Boundary {
  std::string classifier;
  std::vector<double> weights;
  double bias = 0.0;
};

struct ScatterSet {
  std::string domain;
  std::vector<double> points;  // row-major n x 2
  std::vector<int> labels;
};

/// Disagreement rate between two classifiers' predictions.
struct Agreement {
  std::string first;
  std::string second;
  double disagreement = 0.0;
};

struct ExperimentResult {
  std::string id;
  std::vector<std::pair<std::string, std::string>> config;  // snapshot, in order
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<ErrorEntry> errors;
  std::vector<Agreement> agreements;
  std::vector<CurvePoint> curve;
  std::vector<std::string> table_columns;
  std::vector<TableRow> table;
  std::vector<Boundary> boundaries;
  std::vector<ScatterSet> scatter;
  std::optional<DropoutTransfer> transfer;
  std::vector<std::string> feature_names;
  std::vector<std::pair<std::string, double>> timing;  // seconds per cell

  bool empty() const noexcept;
  /// Error of `classifier` on `domain`; throws when absent.
  double error_of(const std::string& classifier, const std::string& domain) const;
  const CurvePoint& point(std::size_t size, const std::string& classifier,
                          const std::string& domain) const;
};

/// Trains s-ls, t-ls, flda-q, s-lr, t-lr and flda-l on a generated domain
/// pair and scores them on the target sample; boundaries and scatter data
/// are included for two-feature specs.
ExperimentResult run_boundary(const SyntheticSpec& spec, const BenchOptions& options = {});

/// Per size and repetition r (seed = spec.seed + r): s-ls on a source
/// subsample, t-ls on a target subsample, flda-q on both; each scored on
/// fixed source and target validation sets.
ExperimentResult run_learning_curve(const SyntheticSpec& spec, const BenchOptions& options = {});

/// sl, tl and flda with the first transfer estimate shifted by each delta,
/// for both losses, as a two-row table.
ExperimentResult run_perturbation(const SyntheticSpec& spec, const BenchOptions& options = {});

/// Source labeled, target labels optional (needed for errors).
ExperimentResult run_pair(const Dataset& source, const Dataset& target,
                          const BenchOptions& options = {});

/// Splits on missing values and runs the pair experiment on the halves.
ExperimentResult run_missing(const Dataset& data, const BenchOptions& options = {});

struct EmitOptions {
  bool timing = false;  // also write timing.csv (not reproducible)
};

/// Writes result.json plus the flat tables that apply: errors.csv,
/// curve.csv, table.csv, transfer.txt, scatter_<domain>.csv and
/// line_<classifier>.csv. Returns the files written.
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const std::filesystem::path& out_dir,
                                                const EmitOptions& options = {});

}  // namespace flda
