#include "ukrig/gp.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace ukrig {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void check_problem(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                   const Eigen::MatrixXd& H) {
  if (U.rows() < 1) throw std::invalid_argument("kriging: need at least one training point");
  if (U.rows() != y.size()) throw std::invalid_argument("kriging: U and y disagree on n");
  if (U.cols() != hp.dimension()) throw std::invalid_argument("kriging: U and hyperparameters disagree on p");
  if (H.rows() > 0 && H.cols() != U.rows()) throw std::invalid_argument("kriging: H must be q x n");
  if (H.rows() >= U.rows()) throw std::invalid_argument("kriging: need n > q");
}

}  // namespace

Eigen::MatrixXd ConditionedBasis::apply(const Eigen::MatrixXd& Hstar) const {
  if (H.rows() == 0) return Eigen::MatrixXd(0, Hstar.cols());
  const Eigen::MatrixXd scaled = scale.cwiseInverse().asDiagonal() * Hstar;
  return R.transpose().triangularView<Eigen::Lower>().solve(scaled);
}

ConditionedBasis condition_basis(const Eigen::MatrixXd& H) {
  const auto q = H.rows();
  const auto n = H.cols();
  ConditionedBasis b;
  b.H.resize(q, n);
  b.scale.resize(q);
  b.R.resize(q, q);
  if (q == 0) return b;
  if (q > n) throw std::runtime_error("trend basis has more functions than points");
  for (Eigen::Index r = 0; r < q; ++r) {
    b.scale[r] = H.row(r).norm();
    if (!(b.scale[r] > 0.0) || !std::isfinite(b.scale[r])) {
      throw std::runtime_error("trend basis has a zero or non-finite row");
    }
  }
  const Eigen::MatrixXd scaled_t = (b.scale.cwiseInverse().asDiagonal() * H).transpose();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled_t);
  b.R = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  const double rmax = b.R.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < q; ++i) {
    if (!(std::abs(b.R(i, i)) > 1e-12 * rmax)) {
      throw std::runtime_error("trend basis is rank deficient at the training points");
    }
  }
  b.H = (qr.householderQ() * Eigen::MatrixXd::Identity(n, q)).transpose();
  b.log_det_T = -b.R.diagonal().cwiseAbs().array().log().sum() - b.scale.array().log().sum();
  return b;
}

KrigingFactors compute_factors(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& H, const JitterPolicy& policy) {
  check_problem(hp, U, y, H);
  return compute_factors(hp, U, y, condition_basis(H), policy);
}

KrigingFactors compute_factors(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                               const ConditionedBasis& basis, const JitterPolicy& policy) {
  check_problem(hp, U, y, basis.H);
  const auto n = U.rows();
  const auto q = basis.H.rows();
  const Eigen::MatrixXd& H = basis.H;

  KrigingFactors f;
  f.basis = basis;
  f.kernel = factorize_kernel(hp, U, policy);
  f.alpha = f.kernel.llt.solve(y);
  double lml = -0.5 * y.dot(f.alpha) - 0.5 * log_det_from_llt(f.kernel.llt);

  if (q > 0) {
    f.gamma = f.kernel.llt.solve(H.transpose());
    const Eigen::MatrixXd A = H * f.gamma;
    f.eta_llt.compute(A);
    if (f.eta_llt.info() != Eigen::Success) {
      throw std::runtime_error("kriging: H K_y^-1 H^T is not positive definite (rank-deficient trend basis)");
    }
    f.eta = f.eta_llt.solve(H);
    const Eigen::VectorXd h_alpha = H * f.alpha;
    f.mu_c = f.eta_llt.solve(h_alpha);
    // Raw-basis estimate: mu = T^T mu_c = D^-1 R^-1 mu_c.
    f.mu = basis.scale.cwiseInverse().asDiagonal() *
           Eigen::VectorXd(basis.R.triangularView<Eigen::Upper>().solve(f.mu_c));
    lml += 0.5 * h_alpha.dot(f.mu_c) - 0.5 * log_det_from_llt(f.eta_llt) + basis.log_det_T;
  } else {
    f.gamma.resize(n, 0);
    f.eta.resize(0, n);
    f.mu_c.resize(0);
    f.mu.resize(0);
  }
  f.lml = lml - 0.5 * static_cast<double>(n - q) * kLog2Pi;
  return f;
}

GradientWorkspace gradient_workspace(const KrigingFactors& f) {
  const auto n = f.alpha.size();
  GradientWorkspace w;
  w.Kinv = f.kernel.llt.solve(Eigen::MatrixXd::Identity(n, n));
  w.rho = f.alpha * f.alpha.transpose();
  if (f.gamma.cols() == 0) {
    w.eps = Eigen::MatrixXd::Zero(n, n);
    w.xi = Eigen::MatrixXd::Zero(n, n);
    w.bracket = w.rho - w.Kinv;
    return w;
  }
  w.eps = f.gamma * f.eta;
  const Eigen::VectorXd eps_alpha = w.eps * f.alpha;
  w.xi = eps_alpha * f.alpha.transpose();
  // xi eps^T = (eps alpha)(eps alpha)^T and eps K^-1 = gamma (eta K^-1).
  const Eigen::MatrixXd eps_kinv = f.gamma * (f.eta * w.Kinv);
  w.bracket = w.rho - w.xi - w.xi.transpose() + eps_alpha * eps_alpha.transpose() + eps_kinv - w.Kinv;
  return w;
}

double lml_simple(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                  const JitterPolicy& policy) {
  check_problem(hp, U, y, Eigen::MatrixXd());
  const KernelFactor kf = factorize_kernel(hp, U, policy);
  const Eigen::VectorXd alpha = kf.llt.solve(y);
  return -0.5 * y.dot(alpha) - 0.5 * log_det_from_llt(kf.llt) - 0.5 * static_cast<double>(y.size()) * kLog2Pi;
}

LmlValue lml_grad_simple(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                         const JitterPolicy& policy) {
  check_problem(hp, U, y, Eigen::MatrixXd());
  const KernelFactor kf = factorize_kernel(hp, U, policy);
  const auto n = y.size();
  const Eigen::VectorXd alpha = kf.llt.solve(y);
  LmlValue out;
  out.value = -0.5 * y.dot(alpha) - 0.5 * log_det_from_llt(kf.llt) - 0.5 * static_cast<double>(n) * kLog2Pi;
  const Eigen::MatrixXd B = alpha * alpha.transpose() - kf.llt.solve(Eigen::MatrixXd::Identity(n, n));
  out.grad = 0.5 * contract_kernel_grad(hp, U, B);
  return out;
}

double lml_universal(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                     const Eigen::MatrixXd& H, const JitterPolicy& policy) {
  return compute_factors(hp, U, y, H, policy).lml;
}

LmlValue lml_grad_universal(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                            const Eigen::MatrixXd& H, const JitterPolicy& policy) {
  check_problem(hp, U, y, H);
  return lml_grad_universal(hp, U, y, condition_basis(H), policy);
}

LmlValue lml_grad_universal(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                            const ConditionedBasis& basis, const JitterPolicy& policy) {
  const KrigingFactors f = compute_factors(hp, U, y, basis, policy);
  const GradientWorkspace w = gradient_workspace(f);
  LmlValue out;
  out.value = f.lml;
  out.grad = 0.5 * contract_kernel_grad(hp, U, w.bracket);
  return out;
}

FittedModel build_model(const Eigen::MatrixXd& U, const Eigen::VectorXd& y, const TrendSpec& trend,
                        const JointInputModel* model, const HyperParams& hp, const JitterPolicy& policy) {
  FittedModel fm;
  fm.trend = trend;
  fm.hp = hp;
  fm.jitter_policy = policy;
  if (model != nullptr) fm.input_model = *model;
  fm.U = U;
  fm.y = y;
  fm.H = basis_eval(trend, model, U);
  fm.factors = compute_factors(hp, U, y, fm.H, policy);
  fm.weights = fm.factors.alpha;
  if (fm.H.rows() > 0) fm.weights -= fm.factors.gamma * fm.factors.mu_c;
  return fm;
}

Eigen::VectorXd predict_mean(const FittedModel& fm, const Eigen::MatrixXd& Ustar) {
  const Eigen::MatrixXd k = cross_kernel(fm.hp, fm.U, Ustar);
  Eigen::VectorXd mean = k.transpose() * fm.weights;
  if (fm.H.rows() > 0) {
    const JointInputModel* model = fm.input_model ? &*fm.input_model : nullptr;
    mean += fm.factors.basis.apply(basis_eval(fm.trend, model, Ustar)).transpose() * fm.factors.mu_c;
  }
  return mean;
}

Prediction predict(const FittedModel& fm, const Eigen::MatrixXd& Ustar) {
  if (Ustar.cols() != fm.U.cols()) throw std::invalid_argument("predict: dimension mismatch");
  const Eigen::MatrixXd k = cross_kernel(fm.hp, fm.U, Ustar);
  const auto& llt = fm.factors.kernel.llt;

  Prediction out;
  out.mean = k.transpose() * fm.weights;
  const Eigen::MatrixXd v = llt.matrixL().solve(k);
  out.variance = Eigen::VectorXd::Constant(Ustar.rows(), fm.hp.amplitude) - v.colwise().squaredNorm().transpose();

  if (fm.H.rows() > 0) {
    const JointInputModel* model = fm.input_model ? &*fm.input_model : nullptr;
    const Eigen::MatrixXd Hs = fm.factors.basis.apply(basis_eval(fm.trend, model, Ustar));
    out.mean += Hs.transpose() * fm.factors.mu_c;
    const Eigen::MatrixXd R = Hs - fm.factors.gamma.transpose() * k;
    const Eigen::MatrixXd w = fm.factors.eta_llt.matrixL().solve(R);
    out.variance += w.colwise().squaredNorm().transpose();
  }
  for (Eigen::Index i = 0; i < out.variance.size(); ++i) {
    if (out.variance[i] < 0.0) {
      ++out.clamped;
      out.max_clamp = std::max(out.max_clamp, -out.variance[i]);
      out.variance[i] = 0.0;
    }
  }
  return out;
}

Box default_log_bounds(int p, const Eigen::VectorXd& y) {
  double var = 0.0;
  if (y.size() > 1) var = (y.array() - y.mean()).square().sum() / static_cast<double>(y.size() - 1);
  if (!(var > 0.0)) var = y.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(1, y.size()));
  if (!(var > 0.0)) var = 1.0;
  const double sd = std::sqrt(var);

  Box box;
  box.lower.resize(p + 2);
  box.upper.resize(p + 2);
  box.lower[0] = std::log(1e-4 * var);
  box.upper[0] = std::log(1e4 * var);
  box.lower.segment(1, p).setConstant(std::log(1e-2));
  box.upper.segment(1, p).setConstant(std::log(1e1));
  box.lower[p + 1] = std::log(1e-8 * sd);
  box.upper[p + 1] = std::log(sd);
  return box;
}

OptimizerConfig default_optimizer_config(int p, const Eigen::VectorXd& y) {
  OptimizerConfig config;
  config.bounds = default_log_bounds(p, y);
  return config;
}

Objective make_lml_objective(const Eigen::MatrixXd& U, const Eigen::VectorXd& y, const Eigen::MatrixXd& H,
                             const JitterPolicy& policy) {
  auto basis = std::make_shared<const ConditionedBasis>(condition_basis(H));
  return [&U, &y, basis, policy](const Eigen::VectorXd& eta, Eigen::VectorXd* grad) -> double {
    const HyperParams hp = HyperParams::from_log(eta);
    if (grad == nullptr) return compute_factors(hp, U, y, *basis, policy).lml;
    LmlValue v = lml_grad_universal(hp, U, y, *basis, policy);
    *grad = std::move(v.grad);
    return v.value;
  };
}

FitResult fit(const Eigen::MatrixXd& U, const Eigen::VectorXd& y, const TrendSpec& trend,
              const JointInputModel* model, const OptimizerConfig& config, Rng& rng, const JitterPolicy& policy) {
  if (U.rows() != y.size()) throw std::invalid_argument("fit: U and y disagree on n");
  if (U.rows() <= trend.basis_count()) throw std::invalid_argument("fit: need more training points than basis functions");
  const Eigen::MatrixXd H = basis_eval(trend, model, U);
  const Objective objective = make_lml_objective(U, y, H, policy);
  FitResult result{{}, maximize(objective, config, rng)};
  result.model = build_model(U, y, trend, model, HyperParams::from_log(result.optimization.best_params), policy);
  return result;
}

nlohmann::json model_to_json(const FittedModel& fm) {
  nlohmann::json j;
  j["format"] = "ukrig-fitted-model";
  j["version"] = 1;
  j["trend"] = std::string(to_token(fm.trend.kind));
  j["dimension"] = fm.trend.dimension;
  j["hyperparameters"] = {
      {"amplitude", fm.hp.amplitude},
      {"lengthscales", std::vector<double>(fm.hp.lengthscales.data(), fm.hp.lengthscales.data() + fm.hp.dimension())},
      {"noise_std", fm.hp.noise_std}};
  j["jitter_policy"] = {{"start", fm.jitter_policy.start}, {"max", fm.jitter_policy.max},
                        {"factor", fm.jitter_policy.factor}};
  j["input_model"] = fm.input_model ? fm.input_model->to_json() : nlohmann::json(nullptr);
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < fm.U.rows(); ++r) {
    rows.push_back(std::vector<double>(fm.U.cols()));
    for (Eigen::Index c = 0; c < fm.U.cols(); ++c) rows.back()[c] = fm.U(r, c);
  }
  j["U"] = std::move(rows);
  j["y"] = std::vector<double>(fm.y.data(), fm.y.data() + fm.y.size());
  j["mu"] = std::vector<double>(fm.factors.mu.data(), fm.factors.mu.data() + fm.factors.mu.size());
  j["lml"] = fm.factors.lml;
  return j;
}

FittedModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "ukrig-fitted-model") throw std::invalid_argument("model_from_json: wrong format tag");
  if (j.at("version").get<int>() != 1) throw std::invalid_argument("model_from_json: unsupported version");
  TrendSpec trend{trend_kind_from_token(j.at("trend").get<std::string>()), j.at("dimension").get<int>()};
  const auto& hj = j.at("hyperparameters");
  HyperParams hp;
  hp.amplitude = hj.at("amplitude").get<double>();
  const auto ls = hj.at("lengthscales").get<std::vector<double>>();
  hp.lengthscales = Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  hp.noise_std = hj.at("noise_std").get<double>();
  JitterPolicy policy;
  if (j.contains("jitter_policy")) {
    const auto& pj = j.at("jitter_policy");
    policy = {pj.at("start").get<double>(), pj.at("max").get<double>(), pj.at("factor").get<double>()};
  }
  std::optional<JointInputModel> model;
  if (!j.at("input_model").is_null()) model = JointInputModel::from_json(j.at("input_model"));

  const auto rows = j.at("U").get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd U(static_cast<Eigen::Index>(rows.size()), trend.dimension);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != trend.dimension) throw std::invalid_argument("model_from_json: bad U row");
    for (int c = 0; c < trend.dimension; ++c) U(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  const auto yv = j.at("y").get<std::vector<double>>();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
  return build_model(U, y, trend, model ? &*model : nullptr, hp, policy);
}

}  // namespace ukrig
