#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"
#include "ukrig/input_model.hpp"
#include "ukrig/kernel.hpp"
#include "ukrig/optimize.hpp"
#include "ukrig/random.hpp"
#include "ukrig/trend.hpp"

namespace ukrig {

/// Well-conditioned equivalent of a basis matrix: Hc = T H with
/// T = R^-T D^-1, where D holds the row norms of H and D^-1 H = (Q R)^T.
/// Kriging predictions do not depend on an invertible change of basis and
/// the likelihood shifts by the constant log|det T|, so all factorizations
/// run on Hc. Raw polynomial bases in physical units (x^2 ~ 1e10 next to 1)
/// otherwise make log|A| and mu too inaccurate for finite differences.
struct ConditionedBasis {
  Eigen::MatrixXd H;      // q x n, orthonormal rows
  Eigen::VectorXd scale;  // D
  Eigen::MatrixXd R;      // q x q upper triangular
  double log_det_T = 0.0;

  /// T Hstar for prediction points (q x l).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& Hstar) const;
};

/// Throws std::runtime_error if H is numerically rank deficient.
ConditionedBasis condition_basis(const Eigen::MatrixXd& H);

/// Factorizations shared by the likelihood, its gradient, and prediction.
///
/// alpha = K_y^-1 y; gamma, eta_llt and eta are formed from the conditioned
/// basis Hc (gamma = K_y^-1 Hc^T, A = Hc gamma, eta = A^-1 Hc), which leaves
/// eps = gamma eta unchanged. mu is the GLS trend estimate for the raw basis,
/// mu_c the one for Hc. With q = 0 the trend members are empty.
struct KrigingFactors {
  KernelFactor kernel;
  ConditionedBasis basis;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd gamma;  // n x q
  Eigen::LLT<Eigen::MatrixXd> eta_llt;
  Eigen::MatrixXd eta;    // q x n
  Eigen::VectorXd mu_c;   // q
  Eigen::VectorXd mu;     // q, (H K_y^-1 H^T)^-1 H K_y^-1 y
  double lml = 0.0;
};

/// Throws CholeskyError if K_y cannot be factored, and std::runtime_error if
/// H is rank deficient.
KrigingFactors compute_factors(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& H, const JitterPolicy& policy = {});
KrigingFactors compute_factors(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                               const ConditionedBasis& basis, const JitterPolicy& policy = {});

/// Intermediate matrices of the universal-kriging gradient.
struct GradientWorkspace {
  Eigen::MatrixXd rho;      // alpha alpha^T
  Eigen::MatrixXd eps;      // gamma eta
  Eigen::MatrixXd xi;       // eps rho
  Eigen::MatrixXd Kinv;     // K_y^-1
  Eigen::MatrixXd bracket;  // rho - xi - xi^T + xi eps^T + (eps - I) K_y^-1
};

/// rho and xi are rank one; xi and xi eps^T are formed from eps alpha so the
/// workspace costs one inverse plus O(n^2 q).
GradientWorkspace gradient_workspace(const KrigingFactors& f);

struct LmlValue {
  double value = 0.0;
  Eigen::VectorXd grad;  // d/d eta_l over [log theta_0, log theta_1..p, log sigma_n]
};

// -1/2 y^T K_y^-1 y - 1/2 log|K_y| - n/2 log 2 pi
double lml_simple(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                  const JitterPolicy& policy = {});
// 1/2 tr((alpha alpha^T - K_y^-1) dK_y/d eta_l)
LmlValue lml_grad_simple(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                         const JitterPolicy& policy = {});

// -1/2 y^T K_y^-1 y + 1/2 y^T C y - 1/2 log|K_y| - 1/2 log|A| - (n - q)/2 log 2 pi
double lml_universal(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                     const Eigen::MatrixXd& H, const JitterPolicy& policy = {});
LmlValue lml_grad_universal(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                            const Eigen::MatrixXd& H, const JitterPolicy& policy = {});
LmlValue lml_grad_universal(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::VectorXd& y,
                            const ConditionedBasis& basis, const JitterPolicy& policy = {});

/// A fitted kriging model. Immutable once built; prediction is const.
struct FittedModel {
  TrendSpec trend;
  HyperParams hp;
  JitterPolicy jitter_policy;
  std::optional<JointInputModel> input_model;  // required for transformed trends
  Eigen::MatrixXd U;  // n x p
  Eigen::VectorXd y;
  Eigen::MatrixXd H;  // q x n
  KrigingFactors factors;
  Eigen::VectorXd weights;  // alpha - gamma mu_c

  double lml() const noexcept { return factors.lml; }
  const Eigen::VectorXd& mu() const noexcept { return factors.mu; }
};

FittedModel build_model(const Eigen::MatrixXd& U, const Eigen::VectorXd& y, const TrendSpec& trend,
                        const JointInputModel* model, const HyperParams& hp, const JitterPolicy& policy = {});

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  int clamped = 0;          // variances raised from negative values to zero
  double max_clamp = 0.0;   // largest magnitude removed by clamping
};

/// Universal-kriging BLUP mean H*^T mu + k^T K_y^-1 (y - H^T mu) and variance
/// sigma_0^2 - k^T K_y^-1 k + R^T A^-1 R with R = H* - H K_y^-1 k.
Prediction predict(const FittedModel& fm, const Eigen::MatrixXd& Ustar);
Eigen::VectorXd predict_mean(const FittedModel& fm, const Eigen::MatrixXd& Ustar);

/// Default log-space box: theta_0 in [1e-4, 1e4] var(y), theta_i in [1e-2, 1e1],
/// sigma_n in [1e-8, 1] std(y). A zero sample variance falls back to mean(y^2).
Box default_log_bounds(int p, const Eigen::VectorXd& y);
OptimizerConfig default_optimizer_config(int p, const Eigen::VectorXd& y);

/// Log marginal likelihood over log-space hyperparameters, with analytic
/// gradient. U and y are referenced and must outlive the objective.
Objective make_lml_objective(const Eigen::MatrixXd& U, const Eigen::VectorXd& y, const Eigen::MatrixXd& H,
                             const JitterPolicy& policy = {});

struct FitResult {
  FittedModel model;
  OptimizeResult optimization;
};

/// Maximum-likelihood fit with `config.restarts` random starts; keeps the
/// restart with the highest LML. Requires n > q.
FitResult fit(const Eigen::MatrixXd& U, const Eigen::VectorXd& y, const TrendSpec& trend,
              const JointInputModel* model, const OptimizerConfig& config, Rng& rng,
              const JitterPolicy& policy = {});

nlohmann::json model_to_json(const FittedModel& fm);
FittedModel model_from_json(const nlohmann::json& j);

}  // namespace ukrig
