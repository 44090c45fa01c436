// Straightforward serial versions of the kernel routines. Tests compare the
// OpenMP paths against these; the benchmark target times both.
#include <cmath>

#include "ukrig/kernel.hpp"

namespace ukrig::reference {

Eigen::MatrixXd kernel_matrix(const HyperParams& hp, const Eigen::MatrixXd& U, double jitter) {
  const Eigen::Index n = U.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K(i, j) = ukrig::kernel_eval(hp, U.row(i).transpose(), U.row(j).transpose());
    }
  }
  K.diagonal().array() += hp.noise_std * hp.noise_std + jitter;
  return K;
}

Eigen::MatrixXd cross_kernel(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& Ustar) {
  Eigen::MatrixXd k(U.rows(), Ustar.rows());
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    for (Eigen::Index j = 0; j < Ustar.rows(); ++j) {
      k(i, j) = ukrig::kernel_eval(hp, U.row(i).transpose(), Ustar.row(j).transpose());
    }
  }
  return k;
}

std::vector<Eigen::MatrixXd> kernel_matrix_grad(const HyperParams& hp, const Eigen::MatrixXd& U) {
  const Eigen::Index n = U.rows();
  const int p = hp.dimension();
  const Eigen::MatrixXd K = reference::kernel_matrix(hp, U, 0.0) -
                            hp.noise_std * hp.noise_std * Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> grads;
  grads.push_back(fault_injection::amplitude_gradient_sign_error() ? Eigen::MatrixXd(-K) : K);
  for (int c = 0; c < p; ++c) {
    Eigen::MatrixXd G(n, n);
    const double t = hp.lengthscales[c];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = U(i, c) - U(j, c);
        G(i, j) = K(i, j) * 2.0 * d * d / (t * t);
      }
    }
    grads.push_back(std::move(G));
  }
  grads.push_back(2.0 * hp.noise_std * hp.noise_std * Eigen::MatrixXd::Identity(n, n));
  return grads;
}

Eigen::VectorXd contract_kernel_grad(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& B) {
  const auto grads = reference::kernel_matrix_grad(hp, U);
  Eigen::VectorXd g(grads.size());
  for (std::size_t l = 0; l < grads.size(); ++l) g[l] = B.cwiseProduct(grads[l].transpose()).sum();
  return g;
}

}  // namespace ukrig::reference
