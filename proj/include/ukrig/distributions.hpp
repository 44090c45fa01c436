#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

namespace ukrig {

// Clamp applied by callers before ppf so optimizer probes and validation
// samples never hit the hypercube boundary.
inline constexpr double kUniformClamp = 1e-12;

double clamp_unit(double u);

// Standard normal helpers.
double normal_pdf(double z);
double normal_cdf(double z);
// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
// Inverse standard normal CDF: rational approximation plus one Halley step.
double normal_ppf(double u);

enum class DistKind { normal, lognormal, uniform, weibull, gumbel };

std::string_view to_string(DistKind kind);
DistKind dist_kind_from_string(std::string_view token);

/// One-dimensional marginal distribution.
///
/// Constructed from the reporting parameterization (mean/std, or lower/upper
/// for the uniform kind) and stored in native form afterwards. Immutable.
class Marginal {
 public:
  /// Moment matching. `a`,`b` are mean/std, or lower/upper for uniform.
  /// Throws std::invalid_argument on non-positive std, empty uniform range,
  /// or non-positive lognormal/weibull mean.
  static Marginal from_moments(DistKind kind, double a, double b);

  DistKind kind() const noexcept { return kind_; }
  // Native parameters:
  //   normal    (mean, std)
  //   lognormal (mu_ln, sigma_ln)
  //   uniform   (lower, upper)
  //   weibull   (shape k, scale lambda)
  //   gumbel    (location, scale)
  double param1() const noexcept { return p1_; }
  double param2() const noexcept { return p2_; }
  // Constructor arguments, kept for reporting and serialization.
  double moment_a() const noexcept { return a_; }
  double moment_b() const noexcept { return b_; }

  double mean() const;
  double stddev() const;

  double pdf(double x) const;
  double cdf(double x) const;
  // Survival function 1 - cdf, evaluated without cancellation where possible.
  double sf(double x) const;
  // Quantile function; u must lie in the open interval (0, 1).
  double ppf(double u) const;
  // Inverse survival function; q in (0, 1).
  double isf(double q) const;

  // Support bounds (may be infinite).
  double support_lower() const;
  double support_upper() const;
  bool in_support(double x) const;

  // Map to/from the standard normal scale, z = Phi^-1(F(x)). Exact closed form
  // for normal and lognormal; tail-aware composition otherwise.
  double to_standard_normal(double x) const;
  double from_standard_normal(double z) const;

  nlohmann::json to_json() const;
  static Marginal from_json(const nlohmann::json& j);

 private:
  Marginal(DistKind kind, double p1, double p2, double a, double b)
      : kind_(kind), p1_(p1), p2_(p2), a_(a), b_(b) {}

  DistKind kind_;
  double p1_;
  double p2_;
  double a_;
  double b_;
};

// Weibull shape from coefficient of variation by bisection.
double weibull_shape_from_cv(double cv);

}  // namespace ukrig
