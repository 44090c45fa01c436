#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "ukrig/input_model.hpp"

namespace ukrig {

enum class TrendKind { zero, constant, linear, quadratic, transformed_linear, transformed_quadratic };

/// Config tokens: "zero" | "constant" | "linear" | "quadratic" | "t-linear" | "t-quadratic".
/// "simple" and "ordinary" are accepted as aliases for zero and constant.
std::string_view to_token(TrendKind kind);
TrendKind trend_kind_from_token(std::string_view token);

/// Number of basis functions: 0, 1, 1+p, or 1+2p+p(p-1)/2.
int basis_count(TrendKind kind, int p);

bool is_transformed(TrendKind kind) noexcept;

struct TrendSpec {
  TrendKind kind = TrendKind::zero;
  int dimension = 0;

  int basis_count() const { return ukrig::basis_count(kind, dimension); }
  bool transformed() const noexcept { return is_transformed(kind); }
};

/// Monomials {1, z_i, z_i^2, z_i z_j (i<j)} of the rows of Z (m x p), in
/// that column order, truncated to the degree of `kind`. Returns q x m.
Eigen::MatrixXd monomial_basis(TrendKind kind, const Eigen::MatrixXd& Z);

/// H (q x m) for the uniform-space points U (m x p). Transformed kinds map
/// each row through the inverse Rosenblatt transform of `model` first and
/// evaluate the monomials in physical space. `model` may be null for the
/// untransformed kinds; std::invalid_argument otherwise.
Eigen::MatrixXd basis_eval(const TrendSpec& spec, const JointInputModel* model, const Eigen::MatrixXd& U);

}  // namespace ukrig
