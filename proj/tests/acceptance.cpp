// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ukrig/benchmarks.hpp"
#include "ukrig/cli.hpp"
#include "ukrig/design.hpp"
#include "ukrig/experiment.hpp"
#include "ukrig/gp.hpp"
#include "ukrig/gradcheck.hpp"

using namespace ukrig;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. analytic vs central-difference gradients
void gradients() {
  const auto t0 = Clock::now();
  double worst = 0;
  std::string where;
  for (int p : {1, 3, 8, 9, 15}) {
    for (auto kind : {TrendKind::zero, TrendKind::constant, TrendKind::linear, TrendKind::quadratic,
                      TrendKind::transformed_linear, TrendKind::transformed_quadratic}) {
      const GradientCheck c = check_gradients(kind, p, 1, 5);
      if (c.max_rel_error > worst || !std::isfinite(c.max_rel_error)) {
        worst = c.max_rel_error;
        where = std::string(to_token(kind)) + " p=" + std::to_string(p);
      }
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst < 1e-5 && secs < 120,
         "max rel error " + fmt("%.2e", worst) + " (" + where + "), " + fmt("%.1f", secs) + " s");
}

// Independent dense formulas for the structural checks.
Eigen::MatrixXd se_kernel(const HyperParams& hp, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      const double s = ((A.row(i) - B.row(j)).transpose().array() / hp.lengthscales.array()).square().sum();
      K(i, j) = hp.amplitude * std::exp(-s);
    }
  }
  return K;
}

// 2. zero trend = simple kriging, constant trend = ordinary kriging
void structural() {
  const double log2pi = std::log(2 * std::numbers::pi);
  double worst_lml = 0, worst_pred = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(1000 + s);
    const int p = 1 + static_cast<int>(s % 3);
    const Eigen::MatrixXd U = maximin_lhs(25, p, rng, 200).points;
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i) y[i] = std::cos(5 * U(i, 0)) + U.row(i).sum();
    HyperParams hp;
    hp.amplitude = 0.5 + uniform_open(rng);
    hp.lengthscales = (0.2 + 0.4 * Eigen::ArrayXd::NullaryExpr(p, [&] { return uniform_open(rng); })).matrix();
    hp.noise_std = 0.05 * uniform_open(rng);
    Eigen::MatrixXd S(40, p);
    for (auto& v : S.reshaped()) v = uniform_open(rng);

    const Eigen::MatrixXd Ky = se_kernel(hp, U, U) + hp.noise_std * hp.noise_std * Eigen::MatrixXd::Identity(25, 25);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(Ky);
    const Eigen::MatrixXd Ki = lu.inverse();
    const double logdet = std::log(std::abs(lu.determinant()));
    const Eigen::MatrixXd k = se_kernel(hp, U, S);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(25);

    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

    // simple
    const double sk_lml = -0.5 * y.dot(Ki * y) - 0.5 * logdet - 12.5 * log2pi;
    const FittedModel z = build_model(U, y, {TrendKind::zero, p}, nullptr, hp, JitterPolicy::none());
    worst_lml = std::max({worst_lml, rel(z.lml(), sk_lml), rel(lml_simple(hp, U, y, JitterPolicy::none()), sk_lml)});
    const Prediction pz = predict(z, S);
    const Eigen::VectorXd sk_mean = k.transpose() * Ki * y;
    const Eigen::VectorXd sk_var = (hp.amplitude - (k.array() * (Ki * k).array()).colwise().sum()).transpose();
    worst_pred = std::max({worst_pred, (pz.mean - sk_mean).lpNorm<Eigen::Infinity>(),
                           (pz.variance - sk_var.cwiseMax(0.0)).lpNorm<Eigen::Infinity>()});

    // ordinary
    const double s1 = one.dot(Ki * one);
    const double mu = one.dot(Ki * y) / s1;
    const Eigen::VectorXd r = y - mu * one;
    const double ok_lml = -0.5 * r.dot(Ki * r) - 0.5 * logdet - 0.5 * std::log(s1) - 12.0 * log2pi;
    const FittedModel c = build_model(U, y, {TrendKind::constant, p}, nullptr, hp, JitterPolicy::none());
    worst_lml = std::max(worst_lml, rel(c.lml(), ok_lml));
    const Prediction pc = predict(c, S);
    const Eigen::VectorXd Kik1 = k.transpose() * Ki * one;
    const Eigen::VectorXd ok_mean = (mu + (k.transpose() * Ki * r).array()).matrix();
    const Eigen::VectorXd ok_var = sk_var.array() + (1.0 - Kik1.array()).square() / s1;
    worst_pred = std::max({worst_pred, std::abs(c.mu()[0] - mu), (pc.mean - ok_mean).lpNorm<Eigen::Infinity>(),
                           (pc.variance - ok_var).lpNorm<Eigen::Infinity>()});
  }
  report(2, worst_lml < 1e-10 && worst_pred < 1e-10,
         "max LML rel diff " + fmt("%.2e", worst_lml) + ", max prediction diff " + fmt("%.2e", worst_pred));
}

// 3. interpolation at training points with sigma_n at its floor. The default
// 1e-10 theta_0 jitter acts as a nugget (mean - y = -jitter * weights), so the
// model is built without it; a failed Cholesky counts as a failure.
void interpolation(const std::vector<Benchmark>& all) {
  double worst_mean = 0, worst_var = 0;
  for (const auto& b : all) {
    Rng rng(2000 + b.id);
    const int p = b.dimension;
    const Eigen::MatrixXd U = maximin_lhs(10 * p, p, rng, 2000).points;
    const Eigen::VectorXd y = b.evaluate_rows(b.input_model.to_physical(U));
    const double sd = std::sqrt((y.array() - y.mean()).square().sum() / (y.size() - 1));
    OptimizerConfig cfg = default_optimizer_config(p, y);
    cfg.restarts = 3;
    const TrendSpec spec{TrendKind::constant, p};
    HyperParams hp = fit(U, y, spec, &b.input_model, cfg, rng).model.hp;
    hp.noise_std = std::exp(cfg.bounds.lower[p + 1]);
    Prediction pr;
    try {
      pr = predict(build_model(U, y, spec, &b.input_model, hp, JitterPolicy::none()), U);
    } catch (const std::exception& e) {
      report(3, false, "#" + std::to_string(b.id) + ": " + e.what());
      return;
    }
    worst_mean = std::max(worst_mean, (pr.mean - y).lpNorm<Eigen::Infinity>() / sd);
    worst_var = std::max(worst_var, pr.variance.maxCoeff() / hp.amplitude);
  }
  report(3, worst_mean <= 1e-6 && worst_var <= 1e-6,
         "max |mean - y|/std(y) " + fmt("%.2e", worst_mean) + ", max var/theta0 " + fmt("%.2e", worst_var) +
             " over 9 benchmarks, no jitter");
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd da = a.array() - a.mean(), db = b.array() - b.mean();
  return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

// 4. Rosenblatt round trip and target correlations
void transforms(const std::vector<Benchmark>& all) {
  double worst = 0;
  for (const auto& b : all) {
    Rng rng(3000 + b.id);
    Eigen::MatrixXd U(1000, b.dimension);
    for (auto& v : U.reshaped()) v = uniform_open(rng);
    worst = std::max(worst, (b.input_model.to_uniform(b.input_model.to_physical(U)) - U).lpNorm<Eigen::Infinity>());
  }
  Rng rng(4000);
  const Eigen::MatrixXd X2 = find_benchmark(all, 2).input_model.sample(rng, 200000);
  const Eigen::MatrixXd X4 = find_benchmark(all, 4).input_model.sample(rng, 200000);
  const double r2 = pearson(X2.col(0), X2.col(1)), r4 = pearson(X4.col(1), X4.col(2));
  report(4, worst < 1e-8 && std::abs(r2 - 0.3) <= 0.01 && std::abs(r4 - 0.5) <= 0.01,
         "round trip max error " + fmt("%.2e", worst) + ", corr #2 " + fmt("%.4f", r2) + ", corr #4 " +
             fmt("%.4f", r4));
}

// 5. NMSE bands at the default protocol
void replication(const std::vector<Benchmark>& all, const fs::path& work) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;  // n = 10p, n_val = 1000, 10 reps, 20 restarts
  std::map<int, std::vector<TrendKind>> plan{
      {1, {TrendKind::zero}},
      {3, {TrendKind::zero, TrendKind::quadratic, TrendKind::transformed_quadratic}},
      {4, {TrendKind::zero, TrendKind::quadratic, TrendKind::transformed_quadratic}},
      {5, {TrendKind::zero, TrendKind::quadratic, TrendKind::transformed_quadratic}},
      {6, {TrendKind::zero}},
      {7, {TrendKind::quadratic, TrendKind::transformed_quadratic}}};
  std::vector<ExperimentRecord> records;
  for (const auto& [id, methods] : plan) {
    const auto part = run_grid({&find_benchmark(all, id)}, methods, {GradMode::analytic}, cfg);
    records.insert(records.end(), part.begin(), part.end());
  }
  std::ofstream csv(work / "replication.csv");
  write_records_csv(csv, records, {"acceptance", cfg.seed, "default-protocol"}, true);

  std::map<std::pair<int, std::string>, double> med;
  for (const auto& c : summarize(records)) med[{c.benchmark, c.method}] = c.count > 0 ? c.nmse_median : NAN;

  bool pass = true;
  std::ostringstream d;
  for (int id : {3, 4, 5, 7}) {
    const double ratio = med[{id, "quadratic"}] / med[{id, "t-quadratic"}];
    pass = pass && ratio >= 3.0;
    d << "#" << id << " quad/t-quad " << fmt("%.3g", ratio) << "; ";
  }
  const std::map<int, double> reference_simple{{1, 4.31e-2}, {3, 4.35e-2}, {4, 6.95e-2}, {5, 2.71e-2}, {6, 1.00e-2}};
  for (const auto& [id, ref] : reference_simple) {
    const double v = med[{id, "zero"}];
    pass = pass && v <= 5 * ref && v >= ref / 5;
    d << "#" << id << " simple " << format_sci3(v) << " vs " << format_sci3(ref) << "; ";
  }
  const double secs = seconds_since(t0);
  pass = pass && secs <= 3600;
  d << fmt("%.0f", secs) << " s";
  report(5, pass, d.str());
}

// 6. analytic vs finite-difference fit time, factorization counts
void speedup(const std::vector<Benchmark>& all) {
  ExperimentConfig cfg;
  cfg.jobs = 1;
  bool pass = true;
  std::ostringstream d;
  for (int id : {6, 7}) {
    const Benchmark& b = find_benchmark(all, id);
    const auto recs = run_grid({&b}, {TrendKind::constant}, {GradMode::analytic, GradMode::fd}, cfg);
    std::vector<double> an, fd;
    for (const auto& r : recs) (r.grad_mode == GradMode::analytic ? an : fd).push_back(r.fit_seconds);
    const double ma = median(an), mf = median(fd);
    pass = pass && ma < mf;
    d << "#" << id << " median " << fmt("%.3f", ma) << " s vs " << fmt("%.3f", mf) << " s; ";

    // One Cholesky per analytic value+gradient; p+1 or more evaluations per FD gradient.
    const RepetitionData data = make_repetition_data(b, cfg, 0);
    const Eigen::MatrixXd H = basis_eval({TrendKind::constant, b.dimension}, nullptr, data.U);
    const Objective obj = make_lml_objective(data.U, data.y, H);
    OptimizerConfig oc = default_optimizer_config(b.dimension, data.y);
    oc.max_iters = 0;
    const Eigen::VectorXd x0 = 0.5 * (oc.bounds.lower + oc.bounds.upper);
    const auto c0 = kernel_cholesky_count();
    const RunDiagnostics ra = maximize_from(obj, x0, oc);
    const auto chol = kernel_cholesky_count() - c0;
    oc.fd_mode = true;
    const RunDiagnostics rf = maximize_from(obj, x0, oc);
    pass = pass && ra.evaluations == 1 && chol == 1 && rf.evaluations >= b.dimension + 1;
    d << "analytic gradient " << chol << " Cholesky, FD gradient " << rf.evaluations << " evaluations; ";
  }
  report(6, pass, d.str());
}

// 7. NMSE metric
void metric() {
  const Eigen::Vector3d y(0, 2, 4);
  Eigen::VectorXd v(1000);
  Rng rng(5);
  for (auto& x : v) x = uniform_open(rng);
  const double perfect = nmse(y, y);
  const double hand = nmse(y, Eigen::Vector3d(1, 2, 3));
  const double mean_pred = nmse(v, Eigen::VectorXd::Constant(1000, v.mean()));
  const bool pass = perfect == 0.0 && hand == 1.0 / 6.0 && std::abs(mean_pred - 0.999) <= 1e-12;
  report(7, pass, "perfect " + fmt("%g", perfect) + ", 3-point " + fmt("%.17g", hand) + ", mean predictor " +
                      fmt("%.15g", mean_pred));
}

// 8. byte-identical records.csv from two runs
void determinism(const fs::path& work) {
  auto run = [&](const std::string& name) {
    const std::string out = (work / name).string();
    std::vector<const char*> argv{"ukrig", "run", "--benchmarks", "1,3,4", "--methods", "constant,t-quadratic",
                                  "--reps", "2", "--restarts", "4", "--seed", "7", "--jobs", "1", "--out",
                                  out.c_str()};
    std::ostringstream so, se;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), so, se);
    std::ifstream f(work / name / "records.csv", std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return std::make_pair(code, s.str());
  };
  const auto a = run("det_a"), b = run("det_b");
  report(8, a.first == 0 && b.first == 0 && !a.second.empty() && a.second == b.second,
         "records.csv " + std::to_string(a.second.size()) + " bytes, " +
             (a.second == b.second ? "identical" : "different"));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "ukrig_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--work-dir") work = argv[i + 1];
  }
  fs::create_directories(work);
  const auto all = registry();

  gradients();
  structural();
  interpolation(all);
  transforms(all);
  replication(all, work);
  speedup(all);
  metric();
  determinism(work);
  return failures == 0 ? 0 : 1;
}
