#pragma once

#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ukrig/distributions.hpp"
#include "ukrig/random.hpp"

namespace ukrig {

/// Joint input distribution: marginals coupled by a Gaussian copula.
///
/// Pairwise correlations are given in physical space (Pearson) and converted
/// to copula correlations at build time. The Rosenblatt transform conditions
/// sequentially in parameter index order, which the lower Cholesky factor of
/// the copula correlation realizes directly.
class JointInputModel {
 public:
  /// Throws std::invalid_argument for a malformed correlation matrix and
  /// std::runtime_error if the copula matrix is not positive definite or a
  /// target correlation is unattainable for the given marginals.
  static JointInputModel build(std::vector<Marginal> marginals, const Eigen::MatrixXd& pearson_corr);
  static JointInputModel independent(std::vector<Marginal> marginals);

  int dimension() const noexcept { return static_cast<int>(marginals_.size()); }
  const std::vector<Marginal>& marginals() const noexcept { return marginals_; }
  const Eigen::MatrixXd& pearson_corr() const noexcept { return pearson_; }
  const Eigen::MatrixXd& copula_corr() const noexcept { return copula_; }
  const Eigen::MatrixXd& copula_chol() const noexcept { return chol_; }
  bool is_independent() const noexcept { return independent_; }

  /// x (physical) -> u in (0,1)^p.
  Eigen::VectorXd rosenblatt_forward(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// u in [0,1]^p (clamped to the open cube) -> x.
  Eigen::VectorXd rosenblatt_inverse(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Row-wise inverse transform of an m x p matrix.
  Eigen::MatrixXd to_physical(const Eigen::MatrixXd& U) const;
  Eigen::MatrixXd to_uniform(const Eigen::MatrixXd& X) const;

  /// count x p physical-space draws.
  Eigen::MatrixXd sample(Rng& rng, int count) const;

  nlohmann::json to_json() const;
  static JointInputModel from_json(const nlohmann::json& j);

 private:
  std::vector<Marginal> marginals_;
  Eigen::MatrixXd pearson_;
  Eigen::MatrixXd copula_;
  Eigen::MatrixXd chol_;
  bool independent_ = true;
};

/// Physical-space Pearson correlation implied by copula correlation `rho_z`
/// between two marginals, by 2-D Gauss-Hermite quadrature (order 32).
double implied_pearson(const Marginal& a, const Marginal& b, double rho_z);

/// Copula correlation that yields physical Pearson correlation `rho_x`.
/// Closed form for normal/normal and lognormal/lognormal pairs, bisection on
/// implied_pearson otherwise.
double copula_correlation(const Marginal& a, const Marginal& b, double rho_x);

}  // namespace ukrig
