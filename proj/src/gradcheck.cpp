#include "ukrig/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ukrig/benchmarks.hpp"
#include "ukrig/design.hpp"
#include "ukrig/distributions.hpp"
#include "ukrig/gp.hpp"

namespace ukrig {

double gradient_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& reference) {
  const double floor = 1e-3 * reference.lpNorm<Eigen::Infinity>();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(reference[i]), floor});
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(analytic[i] - reference[i]) / denom);
  }
  return worst;
}

Eigen::VectorXd lml_central_difference(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                                       const Eigen::MatrixXd& H, double step) {
  const Eigen::VectorXd eta = hp.to_log();
  Eigen::VectorXd g(eta.size());
  auto f = [&](Eigen::Index l, double offset) {
    Eigen::VectorXd e = eta;
    e[l] += offset;
    return lml_universal(HyperParams::from_log(e), U, y, H, JitterPolicy::none());
  };
  for (Eigen::Index l = 0; l < eta.size(); ++l) {
    g[l] = (-f(l, 2 * step) + 8.0 * f(l, step) - 8.0 * f(l, -step) + f(l, -2 * step)) / (12.0 * step);
  }
  return g;
}

JointInputModel gradient_check_model(int p) {
  for (const auto& b : registry()) {
    if (b.dimension == p) return b.input_model;
  }
  const Marginal pool[] = {Marginal::from_moments(DistKind::normal, 0, 4),
                           Marginal::from_moments(DistKind::lognormal, 1, 0.5),
                           Marginal::from_moments(DistKind::uniform, 1, 10),
                           Marginal::from_moments(DistKind::gumbel, 6, 0.9),
                           Marginal::from_moments(DistKind::weibull, 2, 0.5)};
  std::vector<Marginal> m;
  for (int i = 0; i < p; ++i) m.push_back(pool[i % 5]);
  return JointInputModel::independent(std::move(m));
}

GradientCheck check_gradients(TrendKind kind, int p, std::uint64_t seed, int draws) {
  GradientCheck out{kind, p, draws, 0.0};
  const int n = 10 * p;
  const JointInputModel model = gradient_check_model(p);
  Rng rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(p)), to_token(kind)));
  const Eigen::MatrixXd U = maximin_lhs(n, p, rng, 2000).points;

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd u = U.row(i).transpose();
    y[i] = (3.0 * u.array()).sin().sum() + 0.5 * u.sum() * u.sum() + 0.1 * normal_ppf(uniform_open(rng));
  }
  const TrendSpec spec{kind, p};
  const Eigen::MatrixXd H = basis_eval(spec, &model, U);

  for (int d = 0; d < draws; ++d) {
    HyperParams hp;
    hp.amplitude = std::exp(std::log(0.5) + uniform_open(rng) * std::log(4.0));
    hp.lengthscales.resize(p);
    const double base = 0.25 * std::sqrt(static_cast<double>(p));
    for (int i = 0; i < p; ++i) hp.lengthscales[i] = base * std::exp(uniform_open(rng) * std::log(4.0));
    hp.noise_std = 1e-2 * std::sqrt(hp.amplitude) * std::exp(uniform_open(rng) * std::log(3.0));

    const LmlValue v = spec.basis_count() == 0 ? lml_grad_simple(hp, U, y, JitterPolicy::none())
                                               : lml_grad_universal(hp, U, y, H, JitterPolicy::none());
    const Eigen::VectorXd fd = lml_central_difference(hp, U, y, H);
    out.max_rel_error = std::max(out.max_rel_error, gradient_relative_error(v.grad, fd));
  }
  return out;
}

}  // namespace ukrig
