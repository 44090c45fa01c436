#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ukrig {

/// Malformed or invalid configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<int> benchmarks{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::string> methods{"zero", "constant", "linear", "quadratic", "t-linear", "t-quadratic"};
  int n = 0;  // 0 means 10 p
  int n_val = 1000;
  int reps = 10;
  int restarts = 20;
  std::uint64_t seed = 1;
  std::string grad_mode = "analytic";  // analytic | fd | both
  std::string selection = "validation";
  int lhs_budget = 10000;
  int max_iters = 200;
  double grad_tol = 1e-6;
  std::string oakley_coefficients;  // optional JSON sidecar for #9
  std::string out = "results";
  bool plot = false;
  bool timing = false;  // write measured fit_seconds into records.csv
  int jobs = 1;

  nlohmann::json to_json() const;
  /// Accepts "all" for benchmarks and methods. Throws ConfigError.
  static RunConfig from_json(const nlohmann::json& j);
  /// FNV-1a of the settings that determine records.csv (excludes out, plot, jobs).
  std::string hash() const;
};

/// Parses "1,3,8" or "all"-free integer lists. Throws ConfigError.
std::vector<int> parse_int_list(const std::string& text);

/// "%.2E" with the exponent kept at two digits: 0.000941 -> "9.41E-04".
std::string format_sci3(double v);

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate_gradients(const std::vector<int>& dims, std::uint64_t seed, bool inject_sign_error,
                           std::ostream& out, std::ostream& err);
int cmd_table(const std::string& records_path, const std::string& markdown_path, std::ostream& out,
              std::ostream& err);

/// Entry point shared by the executable and tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ukrig
