#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ukrig/random.hpp"

namespace ukrig {

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index size() const noexcept { return lower.size(); }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

struct OptimizerConfig {
  int restarts = 20;
  int max_iters = 200;
  int memory = 10;           // stored curvature pairs
  double grad_tol = 1e-6;    // infinity norm of the projected gradient
  double rel_tol = 1e-10;    // relative objective decrease per iteration
  Box bounds;                // log-space box
  Box init_range;            // initial points sampled uniformly here; empty -> bounds
  bool fd_mode = false;      // replace the analytic gradient by forward differences
  double fd_step = 1e-6;
  int jobs = 1;              // restarts run in parallel when > 1
};

/// Objective to maximize. Writes the gradient when `grad` is non-null.
/// May throw; a throwing evaluation is treated as -infinity.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

enum class StopReason { converged, relative_decrease, max_iters, line_search_failed, failed_start };
std::string_view to_string(StopReason r);

struct RunDiagnostics {
  Eigen::VectorXd start;
  Eigen::VectorXd params;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;  // objective calls, including finite-difference probes
  double seconds = 0.0;
  StopReason reason = StopReason::failed_start;
  std::string error;
  std::vector<double> value_trace;  // accepted objective values, one per iterate
};

struct OptimizeResult {
  Eigen::VectorXd best_params;
  double best_value = 0.0;
  int best_restart = -1;
  std::vector<RunDiagnostics> runs;

  int total_evaluations() const;
};

/// Projected limited-memory BFGS ascent from a single start point.
/// The active set is the variables held at a bound by the gradient; the
/// curvature memory is cleared whenever it changes.
RunDiagnostics maximize_from(const Objective& objective, const Eigen::VectorXd& start, const OptimizerConfig& config);

/// Multi-restart driver: `config.restarts` starts drawn uniformly from the
/// init range. Returns the best run (ties go to the lowest restart index).
/// Throws std::runtime_error if no restart had a finite starting value.
OptimizeResult maximize(const Objective& objective, const OptimizerConfig& config, Rng& rng);

/// Initial points used by maximize(), exposed so callers can reproduce them.
std::vector<Eigen::VectorXd> sample_starts(const OptimizerConfig& config, Rng& rng);

}  // namespace ukrig
