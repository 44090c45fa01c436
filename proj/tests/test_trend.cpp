#include "doctest.h"
#include "ukrig/benchmarks.hpp"
#include "ukrig/distributions.hpp"
#include "ukrig/trend.hpp"

using namespace ukrig;

TEST_CASE("basis counts") {
  for (int p : {1, 2, 3, 8, 9, 15}) {
    CHECK(basis_count(TrendKind::zero, p) == 0);
    CHECK(basis_count(TrendKind::constant, p) == 1);
    CHECK(basis_count(TrendKind::linear, p) == 1 + p);
    CHECK(basis_count(TrendKind::transformed_linear, p) == 1 + p);
    CHECK(basis_count(TrendKind::quadratic, p) == 1 + 2 * p + p * (p - 1) / 2);
    CHECK(basis_count(TrendKind::transformed_quadratic, p) == basis_count(TrendKind::quadratic, p));
  }
  CHECK(basis_count(TrendKind::quadratic, 15) == 136);
  CHECK(TrendSpec{TrendKind::transformed_quadratic, 15}.basis_count() == 136);
}

TEST_CASE("tokens") {
  for (auto k : {TrendKind::zero, TrendKind::constant, TrendKind::linear, TrendKind::quadratic,
                 TrendKind::transformed_linear, TrendKind::transformed_quadratic}) {
    CHECK(trend_kind_from_token(to_token(k)) == k);
  }
  CHECK(trend_kind_from_token("simple") == TrendKind::zero);
  CHECK(trend_kind_from_token("ordinary") == TrendKind::constant);
  CHECK_THROWS_AS(trend_kind_from_token("cubic"), std::invalid_argument);
}

TEST_CASE("monomial evaluation and column order") {
  Eigen::MatrixXd U(1, 2);
  U << 0.5, 0.2;
  const Eigen::MatrixXd H = basis_eval({TrendKind::quadratic, 2}, nullptr, U);
  REQUIRE(H.rows() == 6);
  const double expected[] = {1, 0.5, 0.2, 0.25, 0.04, 0.1};
  for (int i = 0; i < 6; ++i) CHECK(H(i, 0) == doctest::Approx(expected[i]).epsilon(1e-15));

  Eigen::MatrixXd U3(1, 3);
  U3 << 2, 3, 5;
  const Eigen::MatrixXd H3 = monomial_basis(TrendKind::quadratic, U3);
  const double e3[] = {1, 2, 3, 5, 4, 9, 25, 6, 10, 15};
  for (int i = 0; i < 10; ++i) CHECK(H3(i, 0) == e3[i]);

  const Eigen::MatrixXd C = basis_eval({TrendKind::constant, 3}, nullptr, Eigen::MatrixXd::Random(7, 3));
  CHECK(C.rows() == 1);
  CHECK(C.isOnes());
  CHECK(basis_eval({TrendKind::zero, 3}, nullptr, Eigen::MatrixXd::Random(7, 3)).size() == 0);
}

TEST_CASE("transformed bases evaluate quantile functions") {
  const auto u110 = JointInputModel::independent({Marginal::from_moments(DistKind::uniform, 1, 10)});
  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(1, 1, 0.5);
  const Eigen::MatrixXd H = basis_eval({TrendKind::transformed_linear, 1}, &u110, half);
  CHECK(H(1, 0) == doctest::Approx(5.5));
  const auto n04 = JointInputModel::independent({Marginal::from_moments(DistKind::normal, 0, 4)});
  CHECK(basis_eval({TrendKind::transformed_linear, 1}, &n04, half)(1, 0) == 0.0);
  CHECK_THROWS_AS(basis_eval({TrendKind::transformed_linear, 1}, nullptr, half), std::invalid_argument);
  CHECK_THROWS(basis_eval({TrendKind::linear, 2}, nullptr, half));
}

TEST_CASE("standard uniform marginals make transformed and plain bases coincide") {
  const auto m = JointInputModel::independent(
      std::vector<Marginal>(3, Marginal::from_moments(DistKind::uniform, 0, 1)));
  Rng rng(1);
  Eigen::MatrixXd U(25, 3);
  for (auto& v : U.reshaped()) v = uniform_open(rng);
  CHECK(basis_eval({TrendKind::transformed_quadratic, 3}, &m, U) == basis_eval({TrendKind::quadratic, 3}, &m, U));
  CHECK(basis_eval({TrendKind::transformed_linear, 3}, &m, U) == basis_eval({TrendKind::linear, 3}, &m, U));
}

TEST_CASE("transformed linear basis at forward-transformed points returns the physical coordinates") {
  Rng rng(2);
  for (const auto& b : registry()) {
    CAPTURE(b.id);
    const Eigen::MatrixXd X = b.input_model.sample(rng, 20);
    const Eigen::MatrixXd H = basis_eval({TrendKind::transformed_linear, b.dimension}, &b.input_model,
                                         b.input_model.to_uniform(X));
    const Eigen::MatrixXd rel = (H.bottomRows(b.dimension) - X.transpose()).array() / X.transpose().array().abs().max(1.0);
    CHECK(rel.cwiseAbs().maxCoeff() < 1e-8);
  }
}
