#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ukrig/input_model.hpp"

namespace ukrig {

/// Coefficients of the 15-dimensional Oakley & O'Hagan function.
struct OakleyCoefficients {
  Eigen::VectorXd a1, a2, a3;  // 15 each
  Eigen::MatrixXd M;           // 15 x 15

  /// Deterministic stand-in: a_k entries N(0, 0.5^2), M entries N(0, 0.2^2),
  /// drawn from mt19937_64 seeded with `seed` in the order a1, a2, a3, M row-major.
  static OakleyCoefficients generated(std::uint64_t seed = kDefaultSeed);
  /// {"a1":[15], "a2":[15], "a3":[15], "M":[[15] x 15]}
  static OakleyCoefficients from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  static constexpr std::uint64_t kDefaultSeed = 20191015;
};

struct Benchmark {
  int id = 0;
  std::string name;
  int dimension = 0;
  std::function<double(const Eigen::VectorXd&)> evaluate;
  JointInputModel input_model;

  /// Row-wise evaluation of an m x p physical-space matrix.
  Eigen::VectorXd evaluate_rows(const Eigen::MatrixXd& X) const;
};

double oakley_ohagan_1d(const Eigen::VectorXd& x);
double lognormal_ratio(const Eigen::VectorXd& x);
double webster(const Eigen::VectorXd& x);
double short_column(const Eigen::VectorXd& x);
double cantilever_beam(const Eigen::VectorXd& x);
double borehole(const Eigen::VectorXd& x);
double steel_column(const Eigen::VectorXd& x);
double sulfur_model(const Eigen::VectorXd& x);
double oakley_ohagan_15d(const OakleyCoefficients& c, const Eigen::VectorXd& x);

/// All nine benchmarks in id order. #9 uses `oakley` when given, otherwise
/// the generated coefficient set.
std::vector<Benchmark> registry(const OakleyCoefficients* oakley = nullptr);

/// Lookup by id ("6") or name token ("borehole"). Throws std::invalid_argument.
const Benchmark& find_benchmark(const std::vector<Benchmark>& all, std::string_view key);
const Benchmark& find_benchmark(const std::vector<Benchmark>& all, int id);

}  // namespace ukrig
