#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "ukrig/random.hpp"

namespace ukrig {

struct Design {
  Eigen::MatrixXd points;  // n x p, entries are stratum midpoints (k - 0.5) / n
  double min_distance = 0.0;
  int accepted_swaps = 0;
};

inline constexpr int kDefaultLhsBudget = 10000;

/// Maximin Latin hypercube: midpoint LHS with random column permutations,
/// improved by pairwise swaps within a column. A swap is accepted when it
/// increases the minimum pairwise distance, or keeps it and reduces the
/// number of pairs attaining it. Requires n >= 2, p >= 1.
Design maximin_lhs(int n, int p, Rng& rng, int budget = kDefaultLhsBudget);

/// Plain midpoint LHS (no optimization).
Eigen::MatrixXd random_lhs(int n, int p, Rng& rng);

double min_pairwise_distance(const Eigen::MatrixXd& points);

/// Headerless CSV, one row per point, 17 significant digits.
void write_design_csv(std::ostream& out, const Eigen::MatrixXd& points);

}  // namespace ukrig
