#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ukrig {

/// Kernel hyperparameters. Optimized in log space as
/// [log theta_0, log theta_1 .. log theta_p, log sigma_n].
struct HyperParams {
  double amplitude = 1.0;        // theta_0, variance units of y
  Eigen::VectorXd lengthscales;  // theta_1..theta_p, unit-hypercube units
  double noise_std = 0.0;        // sigma_n, units of y

  int dimension() const noexcept { return static_cast<int>(lengthscales.size()); }
  int num_params() const noexcept { return dimension() + 2; }

  Eigen::VectorXd to_log() const;
  static HyperParams from_log(const Eigen::Ref<const Eigen::VectorXd>& eta);
};

struct JitterPolicy {
  double start = 1e-10;  // relative to theta_0
  double max = 1e-4;
  double factor = 10.0;

  static JitterPolicy none() { return {0.0, 0.0, 10.0}; }
};

class CholeskyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// k(u, v) = theta_0 exp(-sum_i (|u_i - v_i| / theta_i)^2)
double kernel_eval(const HyperParams& hp, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v);

/// K + (sigma_n^2 + jitter) I for the rows of U (n x p).
Eigen::MatrixXd kernel_matrix(const HyperParams& hp, const Eigen::MatrixXd& U, double jitter = 0.0);

/// n x l matrix of k(U_i, Ustar_j); no noise term.
Eigen::MatrixXd cross_kernel(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& Ustar);

/// dK_y / d eta_l for every log-space parameter, as dense matrices.
std::vector<Eigen::MatrixXd> kernel_matrix_grad(const HyperParams& hp, const Eigen::MatrixXd& U);

/// Frobenius contraction g_l = sum_ij B_ij dK_y_ji / d eta_l for all l,
/// without materializing the per-parameter matrices. Rows are processed in
/// parallel and partial sums combined in fixed row order, so the result is
/// independent of the thread count.
Eigen::VectorXd contract_kernel_grad(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& B);

struct KernelFactor {
  Eigen::MatrixXd Ky;  // includes sigma_n^2 and jitter on the diagonal
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

/// Assemble and Cholesky-factor K_y, escalating the diagonal jitter on
/// failure. Throws CholeskyError once the policy is exhausted.
KernelFactor factorize_kernel(const HyperParams& hp, const Eigen::MatrixXd& U,
                              const JitterPolicy& policy = {});

/// Number of n x n K_y Cholesky attempts made by factorize_kernel so far.
std::uint64_t kernel_cholesky_count() noexcept;

namespace reference {
// Serial reference implementations, kept for tests and benchmarks.
Eigen::MatrixXd kernel_matrix(const HyperParams& hp, const Eigen::MatrixXd& U, double jitter = 0.0);
Eigen::MatrixXd cross_kernel(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& Ustar);
std::vector<Eigen::MatrixXd> kernel_matrix_grad(const HyperParams& hp, const Eigen::MatrixXd& U);
Eigen::VectorXd contract_kernel_grad(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& B);
}  // namespace reference

namespace fault_injection {
// Test hook: flips the sign of dK/d log theta_0 in gradient routines.
void set_amplitude_gradient_sign_error(bool enabled) noexcept;
bool amplitude_gradient_sign_error() noexcept;
}  // namespace fault_injection

}  // namespace ukrig
