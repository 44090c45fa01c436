#include "ukrig/trend.hpp"

#include <stdexcept>
#include <string>

namespace ukrig {

std::string_view to_token(TrendKind kind) {
  switch (kind) {
    case TrendKind::zero: return "zero";
    case TrendKind::constant: return "constant";
    case TrendKind::linear: return "linear";
    case TrendKind::quadratic: return "quadratic";
    case TrendKind::transformed_linear: return "t-linear";
    case TrendKind::transformed_quadratic: return "t-quadratic";
  }
  return "?";
}

TrendKind trend_kind_from_token(std::string_view token) {
  if (token == "zero" || token == "simple") return TrendKind::zero;
  if (token == "constant" || token == "ordinary") return TrendKind::constant;
  if (token == "linear") return TrendKind::linear;
  if (token == "quadratic") return TrendKind::quadratic;
  if (token == "t-linear") return TrendKind::transformed_linear;
  if (token == "t-quadratic") return TrendKind::transformed_quadratic;
  throw std::invalid_argument("unknown trend kind '" + std::string(token) + "'");
}

bool is_transformed(TrendKind kind) noexcept {
  return kind == TrendKind::transformed_linear || kind == TrendKind::transformed_quadratic;
}

int basis_count(TrendKind kind, int p) {
  switch (kind) {
    case TrendKind::zero: return 0;
    case TrendKind::constant: return 1;
    case TrendKind::linear:
    case TrendKind::transformed_linear: return 1 + p;
    case TrendKind::quadratic:
    case TrendKind::transformed_quadratic: return 1 + 2 * p + p * (p - 1) / 2;
  }
  return 0;
}

Eigen::MatrixXd monomial_basis(TrendKind kind, const Eigen::MatrixXd& Z) {
  const int p = static_cast<int>(Z.cols());
  const auto m = Z.rows();
  const int q = basis_count(kind, p);
  Eigen::MatrixXd H(q, m);
  if (q == 0) return H;

  H.row(0).setOnes();
  if (q == 1) return H;
  int r = 1;
  for (int i = 0; i < p; ++i) H.row(r++) = Z.col(i).transpose();
  if (q == 1 + p) return H;
  for (int i = 0; i < p; ++i) H.row(r++) = Z.col(i).array().square().matrix().transpose();
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) H.row(r++) = Z.col(i).cwiseProduct(Z.col(j)).transpose();
  }
  return H;
}

Eigen::MatrixXd basis_eval(const TrendSpec& spec, const JointInputModel* model, const Eigen::MatrixXd& U) {
  if (U.cols() != spec.dimension) throw std::invalid_argument("basis_eval: dimension mismatch");
  if (!spec.transformed()) return monomial_basis(spec.kind, U);
  if (model == nullptr) throw std::invalid_argument("basis_eval: transformed trend requires an input model");
  if (model->dimension() != spec.dimension) throw std::invalid_argument("basis_eval: model dimension mismatch");
  return monomial_basis(spec.kind, model->to_physical(U));
}

}  // namespace ukrig
