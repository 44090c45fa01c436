#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ukrig/input_model.hpp"
#include "ukrig/kernel.hpp"
#include "ukrig/trend.hpp"

namespace ukrig {

/// Elementwise relative error |a - b| / max(|a|, |b|, floor), with
/// floor = 1e-3 max|b| so that near-zero components do not dominate.
double gradient_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& reference);

/// Fourth-order central differences of the universal (for q = 0, simple) LML
/// in log space. The larger default step keeps rounding noise in the LML
/// (relative ~1e-12 with 136 basis functions at n = 150) below 1e-8.
Eigen::VectorXd lml_central_difference(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                                       const Eigen::MatrixXd& H, double step = 1e-3);

/// Input model used for a p-dimensional check: the benchmark model of that
/// dimension when one exists, otherwise independent mixed marginals.
JointInputModel gradient_check_model(int p);

struct GradientCheck {
  TrendKind kind;
  int dimension = 0;
  int draws = 0;
  double max_rel_error = 0.0;
};

/// Compares analytic and central-difference gradients for `draws` random
/// hyperparameter sets on an n = 10 p maximin design.
GradientCheck check_gradients(TrendKind kind, int p, std::uint64_t seed, int draws = 5);

}  // namespace ukrig
