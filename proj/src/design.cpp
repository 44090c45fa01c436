#include "ukrig/design.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace ukrig {

namespace {

void shuffle(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

struct MinStats {
  double value;
  int count;
};

MinStats min_stats(const Eigen::MatrixXd& d2) {
  const auto n = d2.rows();
  MinStats s{std::numeric_limits<double>::infinity(), 0};
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = d2(i, j);
      if (v < s.value) {
        s = {v, 1};
      } else if (v == s.value) {
        ++s.count;
      }
    }
  }
  return s;
}

}  // namespace

Eigen::MatrixXd random_lhs(int n, int p, Rng& rng) {
  if (n < 2 || p < 1) throw std::invalid_argument("lhs: requires n >= 2 and p >= 1");
  Eigen::MatrixXd points(n, p);
  std::vector<int> perm(n);
  for (int c = 0; c < p; ++c) {
    for (int k = 0; k < n; ++k) perm[k] = k;
    shuffle(perm, rng);
    for (int r = 0; r < n; ++r) points(r, c) = (perm[r] + 0.5) / n;
  }
  return points;
}

double min_pairwise_distance(const Eigen::MatrixXd& points) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      best = std::min(best, (points.row(i) - points.row(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

Design maximin_lhs(int n, int p, Rng& rng, int budget) {
  Design design;
  design.points = random_lhs(n, p, rng);
  auto& X = design.points;

  // Squared distances; only the strict lower triangle is read.
  Eigen::MatrixXd d2(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) d2(i, j) = (X.row(i) - X.row(j)).squaredNorm();
  }
  MinStats current = min_stats(d2);

  auto update_row = [&](Eigen::MatrixXd& d, int r) {
    for (int k = 0; k < n; ++k) {
      if (k == r) continue;
      const double v = (X.row(r) - X.row(k)).squaredNorm();
      if (k < r) {
        d(r, k) = v;
      } else {
        d(k, r) = v;
      }
    }
  };

  for (int it = 0; it < budget; ++it) {
    const int col = static_cast<int>(uniform_index(rng, p));
    const int a = static_cast<int>(uniform_index(rng, n));
    int b = static_cast<int>(uniform_index(rng, n - 1));
    if (b >= a) ++b;

    std::swap(X(a, col), X(b, col));
    update_row(d2, a);
    update_row(d2, b);
    const MinStats next = min_stats(d2);
    if (next.value > current.value || (next.value == current.value && next.count < current.count)) {
      current = next;
      ++design.accepted_swaps;
    } else {
      std::swap(X(a, col), X(b, col));
      update_row(d2, a);
      update_row(d2, b);
    }
  }
  design.min_distance = std::sqrt(current.value);
  return design;
}

void write_design_csv(std::ostream& out, const Eigen::MatrixXd& points) {
  char buf[40];
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", points(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace ukrig
