#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "ukrig/benchmarks.hpp"

using namespace ukrig;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

}  // namespace

TEST_CASE("evaluator examples") {
  CHECK(oakley_ohagan_1d(vec({0.0})) == 6.0);
  CHECK(lognormal_ratio(vec({std::numbers::e, std::numbers::e})) == 1.0);
  CHECK(webster(vec({1.0, 2.0})) == 9.0);
  CHECK(short_column(vec({5.0, 0.0, 0.0})) == 1.0);
  CHECK(sulfur_model(Eigen::VectorXd::Ones(9)) == doctest::Approx(-5.488e-9).epsilon(1e-15));
  CHECK(cantilever_beam(vec({5e5, 16.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-15));

  // Borehole, step by step.
  const double rw = 0.1, r = 3700, Tu = 89335, Hu = 1050, Tl = 89.55, Hl = 760, L = 1400, Kw = 10950;
  const double lr = std::log(r / rw);
  const double inner = 2 * L * Tu / (lr * rw * rw * Kw);
  const double expected = 2 * std::numbers::pi * Tu * (Hu - Hl) / (lr * (1 + inner + Tu / Tl));
  const double got = borehole(vec({rw, r, Tu, Hu, Tl, Hl, L, Kw}));
  CHECK(got == doctest::Approx(expected).epsilon(1e-14));
  CHECK(got == doctest::Approx(70.931895284871004).epsilon(1e-12));

  // Steel column with x8 = 0 drops the buckling term.
  const Eigen::VectorXd s = vec({400, 5e5, 6e5, 6e5, 300, 20, 300, 0, 2.1e5});
  CHECK(steel_column(s) == doctest::Approx(400 - 1.7e6 / (2 * 300 * 20)).epsilon(1e-14));
}

TEST_CASE("domain errors and dimension checks") {
  CHECK_THROWS_AS(lognormal_ratio(vec({1.0, 0.0})), std::domain_error);
  CHECK_THROWS_AS(borehole(vec({0.1, 0.1, 1, 1, 1, 1, 1, 1})), std::domain_error);
  CHECK_THROWS_AS(borehole(vec({0.1, -1, 1, 1, 1, 1, 1, 1})), std::domain_error);
  CHECK_THROWS(webster(vec({1.0})));
  CHECK_THROWS(sulfur_model(Eigen::VectorXd::Ones(8)));
}

TEST_CASE("registry contents") {
  const auto all = registry();
  REQUIRE(all.size() == 9);
  std::set<int> ids;
  const int dims[] = {1, 2, 2, 3, 3, 8, 9, 9, 15};
  for (std::size_t i = 0; i < all.size(); ++i) {
    ids.insert(all[i].id);
    CHECK(all[i].id == static_cast<int>(i) + 1);
    CHECK(all[i].dimension == dims[i]);
    CHECK(all[i].input_model.dimension() == dims[i]);
  }
  CHECK(ids.size() == 9);

  using K = DistKind;
  const K steel[] = {K::lognormal, K::normal, K::gumbel, K::gumbel, K::lognormal,
                     K::lognormal, K::lognormal, K::normal, K::weibull};
  const auto& b7 = find_benchmark(all, 7);
  for (int i = 0; i < 9; ++i) CHECK(b7.input_model.marginals()[i].kind() == steel[i]);

  CHECK(find_benchmark(all, "borehole").id == 6);
  CHECK(find_benchmark(all, "6").name == "borehole");
  CHECK_THROWS_AS(find_benchmark(all, "10"), std::invalid_argument);
  CHECK_THROWS_AS(find_benchmark(all, "nope"), std::invalid_argument);
  CHECK_THROWS_AS(find_benchmark(all, 0), std::invalid_argument);
}

TEST_CASE("every model's samples stay inside its evaluator's domain") {
  const auto all = registry();
  for (const auto& b : all) {
    CAPTURE(b.name);
    Rng rng(100 + b.id);
    const Eigen::MatrixXd X = b.input_model.sample(rng, 100000);
    Eigen::VectorXd y;
    CHECK_NOTHROW(y = b.evaluate_rows(X));
    CHECK(y.allFinite());
  }
}

TEST_CASE("fifteen-dimensional function against a second evaluation order") {
  const OakleyCoefficients c = OakleyCoefficients::generated();
  CHECK(c.a1.size() == 15);
  CHECK(c.M.rows() == 15);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(15);
    for (auto& v : x) v = 4 * uniform_open(rng) - 2;
    double f = 0;
    for (int i = 14; i >= 0; --i) {
      f += c.a3[i] * std::cos(x[i]) + c.a2[i] * std::sin(x[i]) + c.a1[i] * x[i];
      for (int j = 14; j >= 0; --j) f += x[j] * c.M(j, i) * x[i];
    }
    CHECK(oakley_ohagan_15d(c, x) == doctest::Approx(f).epsilon(1e-12));
  }
  // The generator is deterministic and seed dependent.
  CHECK(OakleyCoefficients::generated().M == c.M);
  CHECK(OakleyCoefficients::generated(1).a1 != c.a1);
}

TEST_CASE("coefficient sidecar round trip and validation") {
  OakleyCoefficients c = OakleyCoefficients::generated(3);
  const auto back = OakleyCoefficients::from_json(c.to_json());
  CHECK(back.a1 == c.a1);
  CHECK(back.a2 == c.a2);
  CHECK(back.a3 == c.a3);
  CHECK(back.M == c.M);

  const auto all = registry(&c);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(15, -1, 1);
  CHECK(find_benchmark(all, 9).evaluate(x) == oakley_ohagan_15d(c, x));
  CHECK(find_benchmark(registry(), 9).evaluate(x) != oakley_ohagan_15d(c, x));

  auto j = c.to_json();
  j["a2"].erase(0);
  CHECK_THROWS(OakleyCoefficients::from_json(j));
  j = c.to_json();
  j["M"].erase(3);
  CHECK_THROWS(OakleyCoefficients::from_json(j));
  j = c.to_json();
  j.erase("a3");
  CHECK_THROWS(OakleyCoefficients::from_json(j));
}
