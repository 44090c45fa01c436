#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ukrig/design.hpp"

using namespace ukrig;

namespace {

bool latin(const Eigen::MatrixXd& P) {
  const auto n = P.rows();
  for (Eigen::Index c = 0; c < P.cols(); ++c) {
    std::vector<double> col(P.col(c).data(), P.col(c).data() + n);
    std::sort(col.begin(), col.end());
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(col[k] - (k + 0.5) / n) > 1e-15) return false;
    }
  }
  return true;
}

double brute_min_distance(const Eigen::MatrixXd& P) {
  double best = 1e300;
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = i + 1; j < P.rows(); ++j) best = std::min(best, (P.row(i) - P.row(j)).norm());
  return best;
}

}  // namespace

TEST_CASE("two points in one dimension sit at stratum midpoints") {
  Rng rng(1);
  auto d = maximin_lhs(2, 1, rng);
  std::vector<double> v{d.points(0, 0), d.points(1, 0)};
  std::sort(v.begin(), v.end());
  CHECK(v[0] == 0.25);
  CHECK(v[1] == 0.75);
}

TEST_CASE("Latin property and reported distance") {
  Rng rng(3);
  const auto d = maximin_lhs(30, 3, rng);
  CHECK(d.points.rows() == 30);
  CHECK(latin(d.points));
  CHECK(d.min_distance == doctest::Approx(brute_min_distance(d.points)).epsilon(1e-14));
  CHECK(d.min_distance > 0);
  CHECK(min_pairwise_distance(d.points) == doctest::Approx(brute_min_distance(d.points)).epsilon(1e-14));
}

TEST_CASE("optimized design beats the best of 100 random Latin hypercubes") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed);
    const auto d = maximin_lhs(10, 2, rng);
    Rng rrng(derive_seed(seed, "random-lhs"));
    double best_random = 0;
    for (int i = 0; i < 100; ++i) best_random = std::max(best_random, brute_min_distance(random_lhs(10, 2, rrng)));
    CHECK(d.min_distance >= best_random);
  }
}

TEST_CASE("deterministic given seed and budget") {
  Rng a(77), b(77), c(78);
  const auto da = maximin_lhs(20, 4, a, 500), db = maximin_lhs(20, 4, b, 500), dc = maximin_lhs(20, 4, c, 500);
  CHECK(da.points == db.points);
  CHECK(da.points != dc.points);
}

TEST_CASE("zero budget keeps the initial design and more budget never hurts") {
  Rng a(9), b(9);
  const auto d0 = maximin_lhs(15, 3, a, 0);
  const auto d1 = maximin_lhs(15, 3, b, 5000);
  CHECK(d0.accepted_swaps == 0);
  CHECK(latin(d0.points));
  CHECK(d1.min_distance >= d0.min_distance);
}

TEST_CASE("invalid sizes") {
  Rng rng(1);
  CHECK_THROWS(maximin_lhs(1, 2, rng));
  CHECK_THROWS(maximin_lhs(5, 0, rng));
  CHECK_THROWS(random_lhs(1, 1, rng));
}

TEST_CASE("csv export uses 17 significant digits and no header") {
  Eigen::MatrixXd P(2, 2);
  P << 0.1, 1.0 / 3.0, 0.75, 0.25;
  std::ostringstream out;
  write_design_csv(out, P);
  CHECK(out.str() == "0.10000000000000001,0.33333333333333331\n0.75,0.25\n");
}
