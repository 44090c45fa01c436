#include "ukrig/input_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ukrig {

namespace {

constexpr int kHermiteOrder = 32;

struct HermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;  // normalized so that they sum to one
};

// Golub-Welsch for the physicists' Hermite weight exp(-t^2).
const HermiteRule& hermite_rule() {
  static const HermiteRule rule = [] {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(kHermiteOrder, kHermiteOrder);
    for (int k = 1; k < kHermiteOrder; ++k) {
      J(k, k - 1) = J(k - 1, k) = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    HermiteRule r;
    r.nodes = es.eigenvalues();
    r.weights = es.eigenvectors().row(0).transpose().array().square();
    r.weights /= r.weights.sum();
    return r;
  }();
  return rule;
}

}  // namespace

double implied_pearson(const Marginal& a, const Marginal& b, double rho_z) {
  const auto& [t, w] = hermite_rule();
  const double s = std::sqrt(1.0 - rho_z * rho_z);
  Eigen::VectorXd xa(kHermiteOrder), xb_marg(kHermiteOrder);
  for (int k = 0; k < kHermiteOrder; ++k) {
    xa[k] = a.from_standard_normal(std::numbers::sqrt2 * t[k]);
    xb_marg[k] = b.from_standard_normal(std::numbers::sqrt2 * t[k]);
  }
  // Quadrature moments keep rho_z = 0 mapping to exactly zero correlation.
  const double ma = w.dot(xa);
  const double mb = w.dot(xb_marg);
  const double va = w.dot((xa.array() - ma).square().matrix());
  const double vb = w.dot((xb_marg.array() - mb).square().matrix());

  double cross = 0.0;
  for (int i = 0; i < kHermiteOrder; ++i) {
    const double z1 = std::numbers::sqrt2 * t[i];
    double inner = 0.0;
    for (int j = 0; j < kHermiteOrder; ++j) {
      const double z2 = rho_z * z1 + s * std::numbers::sqrt2 * t[j];
      inner += w[j] * (b.from_standard_normal(z2) - mb);
    }
    cross += w[i] * (xa[i] - ma) * inner;
  }
  return cross / std::sqrt(va * vb);
}

double copula_correlation(const Marginal& a, const Marginal& b, double rho_x) {
  if (!(std::abs(rho_x) < 1.0)) throw std::invalid_argument("correlation must satisfy |rho| < 1");
  if (rho_x == 0.0) return 0.0;
  if (a.kind() == DistKind::normal && b.kind() == DistKind::normal) return rho_x;
  if (a.kind() == DistKind::lognormal && b.kind() == DistKind::lognormal) {
    const double s1 = a.param2();
    const double s2 = b.param2();
    const double arg = 1.0 + rho_x * std::sqrt(std::expm1(s1 * s1) * std::expm1(s2 * s2));
    if (!(arg > 0.0)) throw std::runtime_error("lognormal correlation not attainable");
    const double rz = std::log(arg) / (s1 * s2);
    if (!(std::abs(rz) < 1.0)) throw std::runtime_error("lognormal correlation not attainable");
    return rz;
  }
  double lo = -1.0 + 1e-9;
  double hi = 1.0 - 1e-9;
  double flo = implied_pearson(a, b, lo) - rho_x;
  const double fhi = implied_pearson(a, b, hi) - rho_x;
  if (flo > 0.0 || fhi < 0.0) {
    throw std::runtime_error("Pearson correlation " + std::to_string(rho_x) +
                             " not attainable for the given marginals");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    const double fm = implied_pearson(a, b, mid) - rho_x;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

JointInputModel JointInputModel::build(std::vector<Marginal> marginals,
                                       const Eigen::MatrixXd& pearson_corr) {
  const auto p = static_cast<Eigen::Index>(marginals.size());
  if (p == 0) throw std::invalid_argument("JointInputModel: no marginals");
  if (pearson_corr.rows() != p || pearson_corr.cols() != p) {
    throw std::invalid_argument("JointInputModel: correlation matrix has wrong shape");
  }
  JointInputModel m;
  m.pearson_ = pearson_corr;
  m.copula_ = Eigen::MatrixXd::Identity(p, p);
  m.independent_ = true;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (pearson_corr(i, i) != 1.0) throw std::invalid_argument("JointInputModel: diagonal must be 1");
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double r = pearson_corr(i, j);
      if (r != pearson_corr(j, i)) throw std::invalid_argument("JointInputModel: matrix not symmetric");
      if (!(std::abs(r) < 1.0)) throw std::invalid_argument("JointInputModel: |rho| must be < 1");
      if (r != 0.0) {
        m.independent_ = false;
        m.copula_(i, j) = m.copula_(j, i) = copula_correlation(marginals[i], marginals[j], r);
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m.copula_);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("JointInputModel: copula correlation not positive definite");
  }
  m.chol_ = llt.matrixL();
  m.marginals_ = std::move(marginals);
  return m;
}

JointInputModel JointInputModel::independent(std::vector<Marginal> marginals) {
  const auto p = static_cast<Eigen::Index>(marginals.size());
  return build(std::move(marginals), Eigen::MatrixXd::Identity(p, p));
}

Eigen::VectorXd JointInputModel::rosenblatt_forward(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const int p = dimension();
  if (x.size() != p) throw std::invalid_argument("rosenblatt_forward: dimension mismatch");
  Eigen::VectorXd u(p);
  if (independent_) {
    for (int i = 0; i < p; ++i) {
      if (!marginals_[i].in_support(x[i])) {
        throw std::domain_error("rosenblatt_forward: x[" + std::to_string(i) + "] outside support");
      }
      u[i] = clamp_unit(marginals_[i].cdf(x[i]));
    }
    return u;
  }
  Eigen::VectorXd z(p);
  for (int i = 0; i < p; ++i) z[i] = marginals_[i].to_standard_normal(x[i]);
  const Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>().solve(z);
  for (int i = 0; i < p; ++i) u[i] = clamp_unit(normal_cdf(w[i]));
  return u;
}

Eigen::VectorXd JointInputModel::rosenblatt_inverse(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  const int p = dimension();
  if (u.size() != p) throw std::invalid_argument("rosenblatt_inverse: dimension mismatch");
  for (int i = 0; i < p; ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) {
      throw std::domain_error("rosenblatt_inverse: u outside the unit hypercube");
    }
  }
  Eigen::VectorXd x(p);
  if (independent_) {
    for (int i = 0; i < p; ++i) x[i] = marginals_[i].ppf(clamp_unit(u[i]));
    return x;
  }
  Eigen::VectorXd w(p);
  for (int i = 0; i < p; ++i) w[i] = normal_ppf(clamp_unit(u[i]));
  const Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>() * w;
  for (int i = 0; i < p; ++i) x[i] = marginals_[i].from_standard_normal(z[i]);
  return x;
}

Eigen::MatrixXd JointInputModel::to_physical(const Eigen::MatrixXd& U) const {
  Eigen::MatrixXd X(U.rows(), U.cols());
  for (Eigen::Index r = 0; r < U.rows(); ++r) X.row(r) = rosenblatt_inverse(U.row(r).transpose()).transpose();
  return X;
}

Eigen::MatrixXd JointInputModel::to_uniform(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd U(X.rows(), X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r) U.row(r) = rosenblatt_forward(X.row(r).transpose()).transpose();
  return U;
}

Eigen::MatrixXd JointInputModel::sample(Rng& rng, int count) const {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  const int p = dimension();
  Eigen::MatrixXd X(count, p);
  Eigen::VectorXd u(p);
  for (int r = 0; r < count; ++r) {
    for (int i = 0; i < p; ++i) u[i] = uniform_open(rng);
    X.row(r) = rosenblatt_inverse(u).transpose();
  }
  return X;
}

nlohmann::json JointInputModel::to_json() const {
  nlohmann::json j;
  j["marginals"] = nlohmann::json::array();
  for (const auto& m : marginals_) j["marginals"].push_back(m.to_json());
  j["correlations"] = nlohmann::json::array();
  for (int i = 0; i < dimension(); ++i) {
    for (int k = i + 1; k < dimension(); ++k) {
      if (pearson_(i, k) != 0.0) j["correlations"].push_back({{"i", i}, {"j", k}, {"rho", pearson_(i, k)}});
    }
  }
  return j;
}

JointInputModel JointInputModel::from_json(const nlohmann::json& j) {
  std::vector<Marginal> marginals;
  for (const auto& mj : j.at("marginals")) marginals.push_back(Marginal::from_json(mj));
  const auto p = static_cast<Eigen::Index>(marginals.size());
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(p, p);
  if (j.contains("correlations")) {
    for (const auto& c : j.at("correlations")) {
      const int a = c.at("i").get<int>();
      const int b = c.at("j").get<int>();
      if (a < 0 || b < 0 || a >= p || b >= p || a == b) {
        throw std::invalid_argument("JointInputModel: bad correlation index");
      }
      corr(a, b) = corr(b, a) = c.at("rho").get<double>();
    }
  }
  return build(std::move(marginals), corr);
}

}  // namespace ukrig
