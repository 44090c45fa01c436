#include "ukrig/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ukrig/design.hpp"

namespace ukrig {

double nmse(const Eigen::VectorXd& y, const Eigen::VectorXd& prediction) {
  if (y.size() != prediction.size()) throw std::invalid_argument("nmse: size mismatch");
  const auto n = y.size();
  if (n < 2) throw std::invalid_argument("nmse: need at least two validation points");
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() / static_cast<double>(n - 1);
  if (!(var > 0.0)) throw std::invalid_argument("nmse: validation outputs have zero variance");
  const double mse = (y - prediction).squaredNorm() / static_cast<double>(n);
  return mse / var;
}

double nmse(const FittedModel& model, const Eigen::MatrixXd& val_U, const Eigen::VectorXd& val_y) {
  return nmse(val_y, predict_mean(model, val_U));
}

std::string_view to_string(GradMode mode) { return mode == GradMode::analytic ? "analytic" : "fd"; }

GradMode grad_mode_from_string(std::string_view token) {
  if (token == "analytic") return GradMode::analytic;
  if (token == "fd") return GradMode::fd;
  throw std::invalid_argument("unknown grad mode '" + std::string(token) + "'");
}

std::string_view to_string(Selection s) { return s == Selection::validation ? "validation" : "likelihood"; }

Selection selection_from_string(std::string_view token) {
  if (token == "validation") return Selection::validation;
  if (token == "likelihood") return Selection::likelihood;
  throw std::invalid_argument("unknown selection rule '" + std::string(token) + "'");
}

RepetitionSeeds repetition_seeds(std::uint64_t master, int benchmark_id, int rep) {
  const std::uint64_t bench = derive_seed(master, static_cast<std::uint64_t>(benchmark_id));
  const std::uint64_t r = derive_seed(bench, static_cast<std::uint64_t>(rep));
  return {r, derive_seed(r, "design"), derive_seed(r, "validation"), derive_seed(r, "restarts")};
}

RepetitionData make_repetition_data(const Benchmark& bench, const ExperimentConfig& config, int rep) {
  const auto seeds = repetition_seeds(config.seed, bench.id, rep);
  RepetitionData d;
  Rng design_rng(seeds.design);
  d.U = maximin_lhs(config.training_size(bench.dimension), bench.dimension, design_rng, config.lhs_budget).points;
  d.X = bench.input_model.to_physical(d.U);
  d.y = bench.evaluate_rows(d.X);

  Rng val_rng(seeds.validation);
  d.val_X = bench.input_model.sample(val_rng, config.n_val);
  d.val_U = bench.input_model.to_uniform(d.val_X);
  d.val_y = bench.evaluate_rows(d.val_X);
  return d;
}

ExperimentRecord run_repetition(const Benchmark& bench, TrendKind method, const ExperimentConfig& config, int rep,
                                const RepetitionData& data) {
  const auto seeds = repetition_seeds(config.seed, bench.id, rep);
  ExperimentRecord rec;
  rec.benchmark = bench.id;
  rec.method = std::string(to_token(method));
  rec.rep = rep;
  rec.seed = seeds.rep;
  rec.grad_mode = config.grad_mode;
  rec.n = static_cast<int>(data.U.rows());
  rec.n_val = static_cast<int>(data.val_U.rows());
  rec.restarts = config.restarts;
  rec.nmse = std::numeric_limits<double>::quiet_NaN();

  try {
    const TrendSpec spec{method, bench.dimension};
    const JointInputModel* model = &bench.input_model;
    if (data.U.rows() <= spec.basis_count()) {
      throw std::invalid_argument("need more training points than basis functions");
    }
    const Eigen::MatrixXd H = basis_eval(spec, model, data.U);

    OptimizerConfig oc = default_optimizer_config(bench.dimension, data.y);
    oc.restarts = config.restarts;
    oc.max_iters = config.max_iters;
    oc.grad_tol = config.grad_tol;
    oc.fd_mode = config.grad_mode == GradMode::fd;

    Rng rng(seeds.restarts);
    const Objective objective = make_lml_objective(data.U, data.y, H, JitterPolicy{});
    const auto t0 = std::chrono::steady_clock::now();
    const OptimizeResult opt = maximize(objective, oc, rng);
    rec.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.evaluations = opt.total_evaluations();

    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < static_cast<int>(opt.runs.size()); ++r) {
      const auto& run = opt.runs[r];
      if (run.reason == StopReason::failed_start) {
        ++rec.failed_restarts;
        continue;
      }
      if (config.selection == Selection::likelihood && r != opt.best_restart) continue;
      try {
        const FittedModel fm = build_model(data.U, data.y, spec, model, HyperParams::from_log(run.params));
        const double e = nmse(fm, data.val_U, data.val_y);
        if (std::isfinite(e) && e < best) {
          best = e;
          rec.selected_restart = r;
          rec.lml = fm.lml();
        }
      } catch (const std::exception&) {
        ++rec.failed_restarts;
      }
    }
    if (rec.selected_restart < 0) throw std::runtime_error("no restart produced a usable model");
    rec.nmse = best;
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

std::vector<ExperimentRecord> run_experiment(const Benchmark& bench, TrendKind method,
                                             const ExperimentConfig& config) {
  return run_grid({&bench}, {method}, {config.grad_mode}, config);
}

std::vector<ExperimentRecord> run_grid(const std::vector<const Benchmark*>& benchmarks,
                                       const std::vector<TrendKind>& methods, const std::vector<GradMode>& modes,
                                       const ExperimentConfig& config, const Progress& progress) {
  if (config.reps < 1) throw std::invalid_argument("run_grid: reps must be >= 1");
  if (config.restarts < 1) throw std::invalid_argument("run_grid: restarts must be >= 1");
  if (config.n_val < 2) throw std::invalid_argument("run_grid: n_val must be >= 2");
  const int nm = static_cast<int>(methods.size());
  const int ng = static_cast<int>(modes.size());
  const int reps = config.reps;

  std::vector<ExperimentRecord> out;
  for (const Benchmark* bench : benchmarks) {
    std::vector<ExperimentRecord> cell(static_cast<std::size_t>(nm) * ng * reps);
    std::vector<std::string> data_errors(reps);

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, config.jobs)) if (config.jobs > 1)
    for (int rep = 0; rep < reps; ++rep) {
      RepetitionData data;
      try {
        data = make_repetition_data(*bench, config, rep);
      } catch (const std::exception& e) {
        data_errors[rep] = e.what();
      }
      for (int m = 0; m < nm; ++m) {
        for (int g = 0; g < ng; ++g) {
          ExperimentConfig cfg = config;
          cfg.grad_mode = modes[g];
          ExperimentRecord rec;
          if (data_errors[rep].empty()) {
            rec = run_repetition(*bench, methods[m], cfg, rep, data);
          } else {
            rec.benchmark = bench->id;
            rec.method = std::string(to_token(methods[m]));
            rec.rep = rep;
            rec.seed = repetition_seeds(config.seed, bench->id, rep).rep;
            rec.grad_mode = modes[g];
            rec.failed = true;
            rec.error = data_errors[rep];
          }
          if (progress) {
#pragma omp critical(ukrig_progress)
            progress(rec);
          }
          cell[(static_cast<std::size_t>(m) * ng + g) * reps + rep] = std::move(rec);
        }
      }
    }
    for (auto& r : cell) out.push_back(std::move(r));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const auto k = values.size() / 2;
  return values.size() % 2 == 1 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  sd = 0.0;
  if (v.size() < 2) return;
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  using Key = std::tuple<int, std::string, GradMode>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) {
    Key k{r.benchmark, r.method, r.grad_mode};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }

  std::vector<CellSummary> cells;
  for (const auto& k : order) {
    CellSummary c;
    c.benchmark = std::get<0>(k);
    c.method = std::get<1>(k);
    c.grad_mode = std::get<2>(k);
    std::vector<double> e, s;
    for (const auto* r : groups[k]) {
      if (r->failed) {
        ++c.failures;
        continue;
      }
      e.push_back(r->nmse);
      s.push_back(r->fit_seconds);
    }
    c.count = static_cast<int>(e.size());
    c.std_defined = c.count >= 2;
    if (c.count > 0) {
      mean_std(e, c.nmse_mean, c.nmse_std);
      mean_std(s, c.seconds_mean, c.seconds_std);
      c.nmse_median = median(e);
      c.seconds_median = median(s);
    } else {
      c.nmse_mean = c.nmse_median = c.seconds_mean = c.seconds_median = std::numeric_limits<double>::quiet_NaN();
    }
    cells.push_back(std::move(c));
  }
  return cells;
}

namespace {

std::string format_g17(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const OutputMetadata& meta) {
  out << "# ukrig " << meta.version << " seed=" << meta.seed << " config=" << meta.config_hash << '\n';
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, const OutputMetadata& meta,
                       bool with_timing) {
  write_header(out, meta);
  out << "benchmark,method,rep,seed,grad_mode,nmse,fit_seconds,n,n_val,restarts\n";
  for (const auto& r : records) {
    if (r.failed) continue;
    out << r.benchmark << ',' << r.method << ',' << r.rep << ',' << r.seed << ',' << to_string(r.grad_mode) << ','
        << format_g17(r.nmse) << ',' << (with_timing ? format_g17(r.fit_seconds) : std::string("NA")) << ','
        << r.n << ',' << r.n_val << ',' << r.restarts << '\n';
  }
}

void write_timings_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, const OutputMetadata& meta) {
  write_header(out, meta);
  out << "benchmark,method,rep,grad_mode,fit_seconds,evaluations,selected_restart,failed_restarts\n";
  for (const auto& r : records) {
    if (r.failed) continue;
    out << r.benchmark << ',' << r.method << ',' << r.rep << ',' << to_string(r.grad_mode) << ','
        << format_g17(r.fit_seconds) << ',' << r.evaluations << ',' << r.selected_restart << ','
        << r.failed_restarts << '\n';
  }
}

nlohmann::json summary_to_json(const std::vector<CellSummary>& cells) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    arr.push_back({{"benchmark", c.benchmark},
                   {"method", c.method},
                   {"grad_mode", std::string(to_string(c.grad_mode))},
                   {"count", c.count},
                   {"failures", c.failures},
                   {"nmse_mean", num(c.nmse_mean)},
                   {"nmse_std", num(c.nmse_std)},
                   {"nmse_median", num(c.nmse_median)},
                   {"fit_seconds_mean", num(c.seconds_mean)},
                   {"fit_seconds_std", num(c.seconds_std)},
                   {"fit_seconds_median", num(c.seconds_median)},
                   {"std_defined", c.std_defined}});
  }
  return arr;
}

}  // namespace ukrig
