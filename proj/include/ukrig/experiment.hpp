#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ukrig/benchmarks.hpp"
#include "ukrig/gp.hpp"
#include "ukrig/trend.hpp"

namespace ukrig {

/// Normalized mean squared error: mean((y - yhat)^2) / s^2 with the sample
/// variance s^2 of y (denominator n - 1). Throws if n < 2 or s^2 == 0.
double nmse(const Eigen::VectorXd& y, const Eigen::VectorXd& prediction);
double nmse(const FittedModel& model, const Eigen::MatrixXd& val_U, const Eigen::VectorXd& val_y);

enum class GradMode { analytic, fd };
std::string_view to_string(GradMode mode);
GradMode grad_mode_from_string(std::string_view token);

/// How the reported model is chosen among the restart optima.
enum class Selection { validation, likelihood };
std::string_view to_string(Selection s);
Selection selection_from_string(std::string_view token);

struct ExperimentConfig {
  int n = 0;  // training points; 0 means 10 p
  int n_val = 1000;
  int reps = 10;
  int restarts = 20;
  std::uint64_t seed = 1;
  GradMode grad_mode = GradMode::analytic;
  Selection selection = Selection::validation;
  int lhs_budget = 10000;
  int max_iters = 200;
  double grad_tol = 1e-6;
  int jobs = 1;  // repetitions in parallel

  int training_size(int p) const { return n > 0 ? n : 10 * p; }
};

struct ExperimentRecord {
  int benchmark = 0;
  std::string method;
  int rep = 0;
  std::uint64_t seed = 0;
  GradMode grad_mode = GradMode::analytic;
  double nmse = 0.0;
  double fit_seconds = 0.0;  // all restart optimizations, nothing else
  int n = 0;
  int n_val = 0;
  int restarts = 0;
  int selected_restart = -1;
  double lml = 0.0;
  int evaluations = 0;
  int failed_restarts = 0;
  bool failed = false;
  std::string error;
};

/// Seeds shared by every method and gradient mode of one repetition.
struct RepetitionSeeds {
  std::uint64_t rep, design, validation, restarts;
};
RepetitionSeeds repetition_seeds(std::uint64_t master, int benchmark_id, int rep);

/// Training and validation data of one repetition.
struct RepetitionData {
  Eigen::MatrixXd U, X;
  Eigen::VectorXd y;
  Eigen::MatrixXd val_U, val_X;
  Eigen::VectorXd val_y;
};
RepetitionData make_repetition_data(const Benchmark& bench, const ExperimentConfig& config, int rep);

/// One fit of `method` on prepared data. Never throws; failures are flagged.
ExperimentRecord run_repetition(const Benchmark& bench, TrendKind method, const ExperimentConfig& config, int rep,
                                const RepetitionData& data);

/// `config.reps` repetitions, ordered by rep.
std::vector<ExperimentRecord> run_experiment(const Benchmark& bench, TrendKind method, const ExperimentConfig& config);

using Progress = std::function<void(const ExperimentRecord&)>;

/// Benchmark x method x grad-mode grid. Data for a repetition is built once
/// and shared by all methods and modes.
std::vector<ExperimentRecord> run_grid(const std::vector<const Benchmark*>& benchmarks,
                                       const std::vector<TrendKind>& methods, const std::vector<GradMode>& modes,
                                       const ExperimentConfig& config, const Progress& progress = {});

struct CellSummary {
  int benchmark = 0;
  std::string method;
  GradMode grad_mode = GradMode::analytic;
  int count = 0;
  int failures = 0;
  double nmse_mean = 0.0;
  double nmse_std = 0.0;
  double nmse_median = 0.0;
  double seconds_mean = 0.0;
  double seconds_std = 0.0;
  double seconds_median = 0.0;
  bool std_defined = false;  // needs two or more records
};

/// Per (benchmark, method, grad_mode) statistics over successful records,
/// in first-appearance order.
std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records);

double median(std::vector<double> values);

struct OutputMetadata {
  std::string version;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// records.csv; fit_seconds is written as NA unless `with_timing`.
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records,
                       const OutputMetadata& meta, bool with_timing);
void write_timings_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, const OutputMetadata& meta);
nlohmann::json summary_to_json(const std::vector<CellSummary>& cells);

}  // namespace ukrig
