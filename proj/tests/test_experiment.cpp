#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ukrig/experiment.hpp"

using namespace ukrig;

namespace {

ExperimentRecord rec(int bench, const std::string& method, int rep, double nmse, double secs = 1.0) {
  ExperimentRecord r;
  r.benchmark = bench;
  r.method = method;
  r.rep = rep;
  r.nmse = nmse;
  r.fit_seconds = secs;
  return r;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.reps = 3;
  c.restarts = 4;
  c.n_val = 200;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("nmse examples") {
  const Eigen::Vector3d y(0, 2, 4);
  CHECK(nmse(y, y) == 0.0);
  CHECK(nmse(y, Eigen::Vector3d(1, 2, 3)) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(nmse(y, Eigen::Vector3d::Constant(y.mean())) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  Rng rng(1);
  Eigen::VectorXd big(1000);
  for (auto& v : big) v = normal_ppf(uniform_open(rng));
  CHECK(nmse(big, Eigen::VectorXd::Constant(1000, big.mean())) == doctest::Approx(999.0 / 1000.0).epsilon(1e-12));

  CHECK_THROWS(nmse(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)));
  CHECK_THROWS(nmse(Eigen::VectorXd::Ones(5), Eigen::VectorXd::Zero(5)));
  CHECK_THROWS(nmse(y, Eigen::Vector2d(0, 1)));
}

TEST_CASE("summaries") {
  auto cells = summarize({rec(1, "zero", 0, 1e-2, 2.0), rec(1, "zero", 1, 3e-2, 4.0)});
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].nmse_mean == doctest::Approx(2e-2).epsilon(1e-15));
  CHECK(cells[0].nmse_std == doctest::Approx(std::sqrt(2e-4)).epsilon(1e-14));
  CHECK(cells[0].seconds_mean == 3.0);
  CHECK(cells[0].std_defined);

  cells = summarize({rec(2, "constant", 0, 0.5)});
  CHECK(cells[0].nmse_std == 0.0);
  CHECK_FALSE(cells[0].std_defined);

  cells = summarize({rec(3, "linear", 0, 0.25), rec(3, "linear", 1, 0.25), rec(3, "linear", 2, 0.25)});
  CHECK(cells[0].nmse_std == 0.0);
  CHECK(cells[0].nmse_median == 0.25);

  // Cells keep first-appearance order; failed records are counted, not averaged.
  ExperimentRecord bad = rec(1, "zero", 2, 0.0);
  bad.failed = true;
  ExperimentRecord fd = rec(1, "zero", 0, 7.0);
  fd.grad_mode = GradMode::fd;
  cells = summarize({rec(4, "quadratic", 0, 1.0), rec(1, "zero", 0, 2.0), bad, fd});
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].benchmark == 4);
  CHECK(cells[1].failures == 1);
  CHECK(cells[1].count == 1);
  CHECK(cells[1].nmse_mean == 2.0);
  CHECK(cells[2].grad_mode == GradMode::fd);

  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("token round trips") {
  for (auto m : {GradMode::analytic, GradMode::fd}) CHECK(grad_mode_from_string(to_string(m)) == m);
  for (auto s : {Selection::validation, Selection::likelihood}) CHECK(selection_from_string(to_string(s)) == s);
  CHECK_THROWS(grad_mode_from_string("central"));
  CHECK_THROWS(selection_from_string("aic"));
}

TEST_CASE("seed hierarchy") {
  std::set<std::uint64_t> seen;
  for (int b = 1; b <= 9; ++b) {
    for (int r = 0; r < 10; ++r) {
      const RepetitionSeeds s = repetition_seeds(1, b, r);
      seen.insert(s.rep);
      CHECK(s.design != s.validation);
      CHECK(s.design != s.restarts);
      CHECK(s.validation != s.restarts);
    }
  }
  CHECK(seen.size() == 90);
  CHECK(repetition_seeds(1, 3, 4).rep == repetition_seeds(1, 3, 4).rep);
  CHECK(repetition_seeds(2, 3, 4).rep != repetition_seeds(1, 3, 4).rep);
}

TEST_CASE("repetition data") {
  const auto all = registry();
  const auto& b = find_benchmark(all, 4);
  const ExperimentConfig cfg = small_config();
  const RepetitionData d = make_repetition_data(b, cfg, 0);
  CHECK(d.U.rows() == 30);
  CHECK(d.U.cols() == 3);
  CHECK(d.val_U.rows() == 200);
  CHECK(((d.U.array() > 0) && (d.U.array() < 1)).all());
  CHECK((d.X - b.input_model.to_physical(d.U)).norm() == 0.0);
  CHECK((d.y - b.evaluate_rows(d.X)).norm() == 0.0);
  CHECK((d.val_y - b.evaluate_rows(d.val_X)).norm() == 0.0);
  CHECK((b.input_model.to_physical(d.val_U) - d.val_X).lpNorm<Eigen::Infinity>() <=
        1e-8 * d.val_X.lpNorm<Eigen::Infinity>());

  const RepetitionData again = make_repetition_data(b, cfg, 0), other = make_repetition_data(b, cfg, 1);
  CHECK(again.U == d.U);
  CHECK(again.val_X == d.val_X);
  CHECK(other.U != d.U);
  CHECK(other.val_X != d.val_X);
}

TEST_CASE("run_experiment records") {
  const auto all = registry();
  const auto& b = find_benchmark(all, 3);
  const ExperimentConfig cfg = small_config();
  const auto recs = run_experiment(b, TrendKind::transformed_quadratic, cfg);
  REQUIRE(recs.size() == 3);
  std::set<std::uint64_t> seeds;
  for (int r = 0; r < 3; ++r) {
    CHECK(recs[r].rep == r);
    CHECK_FALSE(recs[r].failed);
    CHECK(recs[r].nmse >= 0.0);
    CHECK(recs[r].fit_seconds > 0.0);
    CHECK(recs[r].method == "t-quadratic");
    CHECK(recs[r].n == 20);
    CHECK(recs[r].restarts == 4);
    CHECK(recs[r].selected_restart >= 0);
    CHECK(recs[r].selected_restart < 4);
    CHECK(recs[r].evaluations > 0);
    seeds.insert(recs[r].seed);
  }
  CHECK(seeds.size() == 3);

  // Deterministic given the master seed.
  const auto again = run_experiment(b, TrendKind::transformed_quadratic, cfg);
  for (int r = 0; r < 3; ++r) {
    CHECK(again[r].nmse == recs[r].nmse);
    CHECK(again[r].selected_restart == recs[r].selected_restart);
  }
}

TEST_CASE("validation selection never loses to likelihood selection on the validation set") {
  const auto all = registry();
  const auto& b = find_benchmark(all, 4);
  ExperimentConfig cfg = small_config();
  const auto byval = run_experiment(b, TrendKind::quadratic, cfg);
  cfg.selection = Selection::likelihood;
  const auto bylml = run_experiment(b, TrendKind::quadratic, cfg);
  for (int r = 0; r < 3; ++r) {
    CHECK(byval[r].nmse <= bylml[r].nmse);
    CHECK(byval[r].lml <= bylml[r].lml + 1e-9 * std::abs(bylml[r].lml));
  }
}

TEST_CASE("grid shares seeds and data across methods and gradient modes") {
  const auto all = registry();
  const std::vector<const Benchmark*> benches{&find_benchmark(all, 1), &find_benchmark(all, 3)};
  ExperimentConfig cfg = small_config();
  cfg.reps = 2;
  cfg.restarts = 3;
  cfg.jobs = 2;
  int calls = 0;
  const auto recs = run_grid(benches, {TrendKind::zero, TrendKind::constant}, {GradMode::analytic, GradMode::fd}, cfg,
                             [&](const ExperimentRecord&) { ++calls; });
  REQUIRE(recs.size() == 2 * 2 * 2 * 2);
  CHECK(calls == 16);
  // benchmark -> method -> mode -> rep
  CHECK(recs[0].benchmark == 1);
  CHECK(recs[0].method == "zero");
  CHECK(recs[0].grad_mode == GradMode::analytic);
  CHECK(recs[1].rep == 1);
  CHECK(recs[2].grad_mode == GradMode::fd);
  CHECK(recs[4].method == "constant");
  CHECK(recs[8].benchmark == 3);
  for (std::size_t i = 0; i < recs.size(); i += 2) {
    CHECK(recs[i].seed == recs[i % 8 == 0 ? i : i - (i % 8)].seed);
  }
  // The same restart starts in both modes: both land on comparable optima.
  for (std::size_t i = 0; i < recs.size(); i += 4) {
    CHECK(recs[i].seed == recs[i + 2].seed);
    CHECK(recs[i + 1].seed == recs[i + 3].seed);
  }

  cfg.jobs = 1;
  const auto serial = run_grid(benches, {TrendKind::zero, TrendKind::constant}, {GradMode::analytic, GradMode::fd}, cfg);
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(serial[i].nmse == recs[i].nmse);
}

TEST_CASE("a fitted model interpolates its own training data") {
  const auto all = registry();
  for (int id : {1, 3, 5}) {
    const auto& b = find_benchmark(all, id);
    const ExperimentConfig cfg = small_config();
    const RepetitionData d = make_repetition_data(b, cfg, 0);
    const TrendSpec spec{TrendKind::constant, b.dimension};
    OptimizerConfig oc = default_optimizer_config(b.dimension, d.y);
    oc.restarts = 4;
    Rng rng(3);
    const FitResult r = fit(d.U, d.y, spec, &b.input_model, oc, rng);
    HyperParams hp = r.model.hp;
    hp.noise_std = std::exp(oc.bounds.lower[b.dimension + 1]);
    const FittedModel floor = build_model(d.U, d.y, spec, &b.input_model, hp);
    CAPTURE(id);
    CHECK(nmse(floor, d.U, d.y) < 1e-8);
  }
}

TEST_CASE("csv and json output") {
  std::vector<ExperimentRecord> recs{rec(3, "t-quadratic", 0, 9.41e-4, 1.25), rec(3, "t-quadratic", 1, 0.1, 2.0)};
  recs[0].seed = 42;
  recs[0].n = 20;
  recs[0].n_val = 1000;
  recs[0].restarts = 20;
  recs[1].failed = true;
  const OutputMetadata meta{"0.1.0", 7, "abc"};
  std::ostringstream plain, timed, timings;
  write_records_csv(plain, recs, meta, false);
  write_records_csv(timed, recs, meta, true);
  write_timings_csv(timings, recs, meta);
  CHECK(plain.str() ==
        "# ukrig 0.1.0 seed=7 config=abc\n"
        "benchmark,method,rep,seed,grad_mode,nmse,fit_seconds,n,n_val,restarts\n"
        "3,t-quadratic,0,42,analytic,0.000941,NA,20,1000,20\n");
  CHECK(timed.str().find(",1.25,20,1000,20\n") != std::string::npos);
  CHECK(timings.str().find("3,t-quadratic,0,analytic,1.25,") != std::string::npos);

  const auto j = summary_to_json(summarize({rec(1, "zero", 0, 0.5)}));
  CHECK(j.size() == 1);
  CHECK(j[0]["nmse_mean"] == 0.5);
  CHECK(j[0]["std_defined"] == false);
}
