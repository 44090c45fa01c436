#include "ukrig/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <stdexcept>

namespace ukrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 40;

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
};

// L-BFGS two-loop recursion restricted to the free variables (mask = 1).
Eigen::VectorXd two_loop(const Eigen::VectorXd& g, const std::deque<CurvaturePair>& pairs,
                         const Eigen::VectorXd& mask) {
  Eigen::VectorXd q = g.cwiseProduct(mask);
  const auto m = pairs.size();
  std::vector<double> alpha(m, 0.0), rho(m, 0.0);
  for (std::size_t k = m; k-- > 0;) {
    const Eigen::VectorXd s = pairs[k].s.cwiseProduct(mask);
    const Eigen::VectorXd y = pairs[k].y.cwiseProduct(mask);
    const double sy = s.dot(y);
    if (!(sy > 0.0)) continue;
    rho[k] = 1.0 / sy;
    alpha[k] = rho[k] * s.dot(q);
    q -= alpha[k] * y;
  }
  if (m > 0) {
    const Eigen::VectorXd s = pairs.back().s.cwiseProduct(mask);
    const Eigen::VectorXd y = pairs.back().y.cwiseProduct(mask);
    const double yy = y.squaredNorm();
    if (yy > 0.0 && s.dot(y) > 0.0) q *= s.dot(y) / yy;
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (rho[k] == 0.0) continue;
    const Eigen::VectorXd s = pairs[k].s.cwiseProduct(mask);
    const Eigen::VectorXd y = pairs[k].y.cwiseProduct(mask);
    const double beta = rho[k] * y.dot(q);
    q += (alpha[k] - beta) * s;
  }
  return q;
}

}  // namespace

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::relative_decrease: return "relative_decrease";
    case StopReason::max_iters: return "max_iters";
    case StopReason::line_search_failed: return "line_search_failed";
    case StopReason::failed_start: return "failed_start";
  }
  return "?";
}

int OptimizeResult::total_evaluations() const {
  int total = 0;
  for (const auto& r : runs) total += r.evaluations;
  return total;
}

RunDiagnostics maximize_from(const Objective& objective, const Eigen::VectorXd& start, const OptimizerConfig& config) {
  const Box& box = config.bounds;
  const Eigen::Index n = start.size();
  if (box.size() != n || box.upper.size() != n) throw std::invalid_argument("maximize: bounds have wrong size");
  if (!(box.lower.array() < box.upper.array()).all()) throw std::invalid_argument("maximize: lower >= upper");

  const auto t0 = std::chrono::steady_clock::now();
  RunDiagnostics diag;
  diag.start = start;

  // Internally minimize phi = -f; non-finite or throwing evaluations are +inf.
  auto value_only = [&](const Eigen::VectorXd& x) -> double {
    ++diag.evaluations;
    try {
      const double f = objective(x, nullptr);
      return std::isfinite(f) ? -f : kInf;
    } catch (const std::exception&) {
      return kInf;
    }
  };
  auto evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) -> double {
    if (config.fd_mode) {
      const double phi = value_only(x);
      if (!std::isfinite(phi)) return kInf;
      g.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd probe = x;
        double h = config.fd_step;
        if (x[i] + h > box.upper[i]) h = -h;
        probe[i] += h;
        const double phi_i = value_only(probe);
        if (!std::isfinite(phi_i)) return kInf;
        g[i] = (phi_i - phi) / h;
      }
      return phi;
    }
    ++diag.evaluations;
    try {
      Eigen::VectorXd grad(n);
      const double f = objective(x, &grad);
      if (!std::isfinite(f) || !grad.allFinite()) return kInf;
      g = -grad;
      return -f;
    } catch (const std::exception&) {
      return kInf;
    }
  };

  Eigen::VectorXd x = box.project(start);
  Eigen::VectorXd g;
  double phi = evaluate(x, g);
  if (!std::isfinite(phi)) {
    diag.params = x;
    diag.value = -kInf;
    diag.reason = StopReason::failed_start;
    diag.error = "non-finite objective at the initial point";
    diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return diag;
  }
  diag.value_trace.push_back(-phi);

  std::deque<CurvaturePair> pairs;
  Eigen::VectorXd prev_mask = Eigen::VectorXd::Constant(n, -1.0);
  diag.reason = StopReason::max_iters;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const double pg_norm = (x - box.project(x - g)).lpNorm<Eigen::Infinity>();
    if (pg_norm < config.grad_tol) {
      diag.reason = StopReason::converged;
      break;
    }

    Eigen::VectorXd mask(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool held = (x[i] <= box.lower[i] && g[i] > 0.0) || (x[i] >= box.upper[i] && g[i] < 0.0);
      mask[i] = held ? 0.0 : 1.0;
    }
    if (mask != prev_mask) {
      pairs.clear();
      prev_mask = mask;
    }

    Eigen::VectorXd xt, gt;
    double phit = kInf;
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::VectorXd dir = -two_loop(g, pairs, mask);
      if (!(g.dot(dir) < 0.0) || !dir.allFinite()) {
        pairs.clear();
        dir = -g.cwiseProduct(mask);
      }
      const double dnorm = dir.lpNorm<Eigen::Infinity>();
      if (!(dnorm > 0.0)) break;
      double t = pairs.empty() ? std::min(1.0, 1.0 / dnorm) : 1.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
        xt = box.project(x + t * dir);
        const Eigen::VectorXd step = xt - x;
        if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
        const double slope = g.dot(step);
        if (!(slope < 0.0)) continue;
        phit = evaluate(xt, gt);
        if (std::isfinite(phit) && phit <= phi + kArmijo * slope) {
          accepted = true;
          break;
        }
      }
      if (!accepted) pairs.clear();
    }
    if (!accepted) {
      diag.reason = StopReason::line_search_failed;
      break;
    }

    CurvaturePair cp{xt - x, gt - g};
    const double sy = cp.s.dot(cp.y);
    if (sy > 1e-12 * cp.y.squaredNorm() && sy > 0.0) {
      pairs.push_back(std::move(cp));
      if (static_cast<int>(pairs.size()) > config.memory) pairs.pop_front();
    }

    const double decrease = phi - phit;
    x = std::move(xt);
    g = std::move(gt);
    phi = phit;
    ++diag.iterations;
    diag.value_trace.push_back(-phi);
    if (decrease <= config.rel_tol * std::max({std::abs(phi), std::abs(phi + decrease), 1.0})) {
      diag.reason = StopReason::relative_decrease;
      break;
    }
  }

  diag.params = x;
  diag.value = -phi;
  diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return diag;
}

std::vector<Eigen::VectorXd> sample_starts(const OptimizerConfig& config, Rng& rng) {
  const Box& range = config.init_range.size() > 0 ? config.init_range : config.bounds;
  std::vector<Eigen::VectorXd> starts;
  for (int r = 0; r < config.restarts; ++r) {
    Eigen::VectorXd x(range.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] = range.lower[i] + uniform_open(rng) * (range.upper[i] - range.lower[i]);
    }
    starts.push_back(std::move(x));
  }
  return starts;
}

OptimizeResult maximize(const Objective& objective, const OptimizerConfig& config, Rng& rng) {
  if (config.restarts < 1) throw std::invalid_argument("maximize: restarts must be >= 1");
  const auto starts = sample_starts(config, rng);
  OptimizeResult result;
  result.runs.resize(starts.size());

  const int count = static_cast<int>(starts.size());
  if (config.jobs > 1) {
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.jobs)
    for (int r = 0; r < count; ++r) {
      try {
        result.runs[r] = maximize_from(objective, starts[r], config);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (int r = 0; r < count; ++r) result.runs[r] = maximize_from(objective, starts[r], config);
  }

  for (int r = 0; r < count; ++r) {
    const auto& run = result.runs[r];
    if (run.reason == StopReason::failed_start) continue;
    if (result.best_restart < 0 || run.value > result.best_value) {
      result.best_restart = r;
      result.best_value = run.value;
      result.best_params = run.params;
    }
  }
  if (result.best_restart < 0) {
    throw std::runtime_error("maximize: all " + std::to_string(count) +
                             " restarts produced a non-finite objective at their initial point");
  }
  return result;
}

}  // namespace ukrig
