#include "ukrig/kernel.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace ukrig {

namespace {

std::atomic<std::uint64_t> g_cholesky_count{0};
std::atomic<bool> g_amplitude_sign_error{false};

// Below this size the OpenMP fork costs more than the loop.
constexpr Eigen::Index kParallelThreshold = 64;

void check_dims(const HyperParams& hp, Eigen::Index cols, const char* what) {
  if (cols != hp.dimension()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(cols) +
                                " columns vs " + std::to_string(hp.dimension()) + " lengthscales)");
  }
}

}  // namespace

Eigen::VectorXd HyperParams::to_log() const {
  Eigen::VectorXd eta(num_params());
  eta[0] = std::log(amplitude);
  eta.segment(1, dimension()) = lengthscales.array().log();
  eta[dimension() + 1] = std::log(noise_std);
  return eta;
}

HyperParams HyperParams::from_log(const Eigen::Ref<const Eigen::VectorXd>& eta) {
  if (eta.size() < 3) throw std::invalid_argument("HyperParams::from_log: need at least 3 parameters");
  const auto p = eta.size() - 2;
  HyperParams hp;
  hp.amplitude = std::exp(eta[0]);
  hp.lengthscales = eta.segment(1, p).array().exp();
  hp.noise_std = std::exp(eta[p + 1]);
  return hp;
}

double kernel_eval(const HyperParams& hp, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != hp.dimension() || v.size() != hp.dimension()) {
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  }
  double s = 0.0;
  for (int i = 0; i < hp.dimension(); ++i) {
    const double d = std::abs(u[i] - v[i]) / hp.lengthscales[i];
    s += d * d;
  }
  return hp.amplitude * std::exp(-s);
}

Eigen::MatrixXd kernel_matrix(const HyperParams& hp, const Eigen::MatrixXd& U, double jitter) {
  check_dims(hp, U.cols(), "kernel_matrix");
  const Eigen::Index n = U.rows();
  const int p = hp.dimension();
  const double diag = hp.amplitude + (hp.noise_std * hp.noise_std + jitter);
  Eigen::MatrixXd K(n, n);

#pragma omp parallel for schedule(dynamic, 8) if (n > kParallelThreshold)
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = diag;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < p; ++k) {
        const double d = std::abs(U(i, k) - U(j, k)) / hp.lengthscales[k];
        s += d * d;
      }
      K(i, j) = hp.amplitude * std::exp(-s);
    }
  }
  K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
  return K;
}

Eigen::MatrixXd cross_kernel(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& Ustar) {
  check_dims(hp, U.cols(), "cross_kernel");
  check_dims(hp, Ustar.cols(), "cross_kernel");
  const Eigen::Index n = U.rows();
  const Eigen::Index l = Ustar.rows();
  const int p = hp.dimension();
  Eigen::MatrixXd k(n, l);

#pragma omp parallel for schedule(static) if (l * n > kParallelThreshold * kParallelThreshold)
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = 0.0;
      for (int c = 0; c < p; ++c) {
        const double d = std::abs(U(i, c) - Ustar(j, c)) / hp.lengthscales[c];
        s += d * d;
      }
      k(i, j) = hp.amplitude * std::exp(-s);
    }
  }
  return k;
}

std::vector<Eigen::MatrixXd> kernel_matrix_grad(const HyperParams& hp, const Eigen::MatrixXd& U) {
  check_dims(hp, U.cols(), "kernel_matrix_grad");
  const Eigen::Index n = U.rows();
  const int p = hp.dimension();
  const double amp_sign = fault_injection::amplitude_gradient_sign_error() ? -1.0 : 1.0;
  std::vector<Eigen::MatrixXd> grads(p + 2, Eigen::MatrixXd::Zero(n, n));

#pragma omp parallel for schedule(dynamic, 8) if (n > kParallelThreshold)
  for (Eigen::Index j = 0; j < n; ++j) {
    grads[0](j, j) = amp_sign * hp.amplitude;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (int c = 0; c < p; ++c) {
        const double d = std::abs(U(i, c) - U(j, c)) / hp.lengthscales[c];
        s += d * d;
      }
      const double kij = hp.amplitude * std::exp(-s);
      grads[0](i, j) = grads[0](j, i) = amp_sign * kij;
      for (int c = 0; c < p; ++c) {
        const double d = (U(i, c) - U(j, c)) / hp.lengthscales[c];
        grads[c + 1](i, j) = grads[c + 1](j, i) = kij * 2.0 * d * d;
      }
    }
  }
  grads[p + 1].diagonal().setConstant(2.0 * hp.noise_std * hp.noise_std);
  return grads;
}

Eigen::VectorXd contract_kernel_grad(const HyperParams& hp, const Eigen::MatrixXd& U, const Eigen::MatrixXd& B) {
  check_dims(hp, U.cols(), "contract_kernel_grad");
  const Eigen::Index n = U.rows();
  if (B.rows() != n || B.cols() != n) throw std::invalid_argument("contract_kernel_grad: B has wrong shape");
  const int p = hp.dimension();
  const int d = p + 2;
  const double amp_sign = fault_injection::amplitude_gradient_sign_error() ? -1.0 : 1.0;

  // Column j of `partial` holds the contributions of pairs (i >= j).
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(d, n);

#pragma omp parallel for schedule(dynamic, 8) if (n > kParallelThreshold)
  for (Eigen::Index j = 0; j < n; ++j) {
    auto acc = partial.col(j);
    acc[0] = amp_sign * hp.amplitude * B(j, j);
    acc[p + 1] = 2.0 * hp.noise_std * hp.noise_std * B(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (int c = 0; c < p; ++c) {
        const double dc = std::abs(U(i, c) - U(j, c)) / hp.lengthscales[c];
        s += dc * dc;
      }
      const double w = (B(i, j) + B(j, i)) * hp.amplitude * std::exp(-s);
      acc[0] += amp_sign * w;
      for (int c = 0; c < p; ++c) {
        const double dc = (U(i, c) - U(j, c)) / hp.lengthscales[c];
        acc[c + 1] += w * 2.0 * dc * dc;
      }
    }
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < n; ++j) g += partial.col(j);
  return g;
}

KernelFactor factorize_kernel(const HyperParams& hp, const Eigen::MatrixXd& U, const JitterPolicy& policy) {
  KernelFactor f;
  f.Ky = kernel_matrix(hp, U, 0.0);
  double jitter = policy.start * hp.amplitude;
  const double max_jitter = policy.max * hp.amplitude;
  for (;;) {
    Eigen::MatrixXd Kj = f.Ky;
    Kj.diagonal().array() += jitter;
    g_cholesky_count.fetch_add(1, std::memory_order_relaxed);
    f.llt.compute(Kj);
    if (f.llt.info() == Eigen::Success) {
      f.Ky = std::move(Kj);
      f.jitter = jitter;
      return f;
    }
    if (jitter >= max_jitter) break;
    jitter = jitter > 0.0 ? std::min(jitter * policy.factor, max_jitter) : std::min(1e-10 * hp.amplitude, max_jitter);
  }
  throw CholeskyError("Cholesky of K_y failed with jitter up to " + std::to_string(max_jitter));
}

std::uint64_t kernel_cholesky_count() noexcept { return g_cholesky_count.load(std::memory_order_relaxed); }

namespace fault_injection {
void set_amplitude_gradient_sign_error(bool enabled) noexcept { g_amplitude_sign_error = enabled; }
bool amplitude_gradient_sign_error() noexcept { return g_amplitude_sign_error; }
}  // namespace fault_injection

}  // namespace ukrig
