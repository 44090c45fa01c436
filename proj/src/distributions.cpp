#include "ukrig/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ukrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Acklam's rational approximation to the inverse normal CDF, lower half.
double normal_ppf_approx_lower(double u) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  if (u < kLow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

void require_open_unit(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error(std::string(what) + ": probability must lie in (0, 1)");
  }
}

}  // namespace

double clamp_unit(double u) {
  if (std::isnan(u)) throw std::domain_error("clamp_unit: NaN probability");
  return std::min(std::max(u, kUniformClamp), 1.0 - kUniformClamp);
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_ppf(double u) {
  require_open_unit(u, "normal_ppf");
  // 1 - u is exact for u >= 0.5, so the upper half reuses the lower branch.
  if (u > 0.5) return -normal_ppf(1.0 - u);
  double x = normal_ppf_approx_lower(u);
  // Halley refinement on the cdf residual.
  const double e = normal_cdf(x) - u;
  const double t = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= t / (1.0 + 0.5 * x * t);
  return x;
}

std::string_view to_string(DistKind kind) {
  switch (kind) {
    case DistKind::normal: return "normal";
    case DistKind::lognormal: return "lognormal";
    case DistKind::uniform: return "uniform";
    case DistKind::weibull: return "weibull";
    case DistKind::gumbel: return "gumbel";
  }
  return "?";
}

DistKind dist_kind_from_string(std::string_view token) {
  if (token == "normal") return DistKind::normal;
  if (token == "lognormal") return DistKind::lognormal;
  if (token == "uniform") return DistKind::uniform;
  if (token == "weibull") return DistKind::weibull;
  if (token == "gumbel") return DistKind::gumbel;
  throw std::invalid_argument("unknown distribution kind '" + std::string(token) + "'");
}

double weibull_shape_from_cv(double cv) {
  // Squared CV as a function of shape, decreasing in k.
  auto cv2 = [](double k) {
    return std::expm1(std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k));
  };
  const double target = cv * cv;
  double lo = 0.05;
  double hi = 1000.0;
  if (!(cv2(lo) >= target && cv2(hi) <= target)) {
    throw std::runtime_error("weibull_shape_from_cv: no bracket for cv = " + std::to_string(cv));
  }
  while (hi - lo > 1e-12 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (cv2(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Marginal Marginal::from_moments(DistKind kind, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("Marginal: non-finite parameter");
  }
  if (kind == DistKind::uniform) {
    if (!(b > a)) throw std::invalid_argument("Marginal: uniform requires upper > lower");
    return Marginal(kind, a, b, a, b);
  }
  if (!(b > 0.0)) throw std::invalid_argument("Marginal: standard deviation must be positive");

  switch (kind) {
    case DistKind::normal:
      return Marginal(kind, a, b, a, b);
    case DistKind::lognormal: {
      if (!(a > 0.0)) throw std::invalid_argument("Marginal: lognormal mean must be positive");
      const double cv = b / a;
      const double s2 = std::log1p(cv * cv);
      return Marginal(kind, std::log(a) - 0.5 * s2, std::sqrt(s2), a, b);
    }
    case DistKind::gumbel: {
      const double scale = b * std::sqrt(6.0) / std::numbers::pi;
      return Marginal(kind, a - std::numbers::egamma * scale, scale, a, b);
    }
    case DistKind::weibull: {
      if (!(a > 0.0)) throw std::invalid_argument("Marginal: weibull mean must be positive");
      const double k = weibull_shape_from_cv(b / a);
      const double scale = a / std::exp(std::lgamma(1.0 + 1.0 / k));
      return Marginal(kind, k, scale, a, b);
    }
    case DistKind::uniform:
      break;
  }
  throw std::logic_error("unreachable");
}

double Marginal::mean() const {
  switch (kind_) {
    case DistKind::normal: return p1_;
    case DistKind::lognormal: return std::exp(p1_ + 0.5 * p2_ * p2_);
    case DistKind::uniform: return 0.5 * (p1_ + p2_);
    case DistKind::weibull: return p2_ * std::exp(std::lgamma(1.0 + 1.0 / p1_));
    case DistKind::gumbel: return p1_ + std::numbers::egamma * p2_;
  }
  return 0.0;
}

double Marginal::stddev() const {
  switch (kind_) {
    case DistKind::normal: return p2_;
    case DistKind::lognormal: return mean() * std::sqrt(std::expm1(p2_ * p2_));
    case DistKind::uniform: return (p2_ - p1_) / std::sqrt(12.0);
    case DistKind::weibull: {
      const double g1 = std::lgamma(1.0 + 1.0 / p1_);
      const double g2 = std::lgamma(1.0 + 2.0 / p1_);
      return p2_ * std::exp(g1) * std::sqrt(std::expm1(g2 - 2.0 * g1));
    }
    case DistKind::gumbel: return p2_ * std::numbers::pi / std::sqrt(6.0);
  }
  return 0.0;
}

double Marginal::support_lower() const {
  switch (kind_) {
    case DistKind::uniform: return p1_;
    case DistKind::lognormal:
    case DistKind::weibull: return 0.0;
    default: return -kInf;
  }
}

double Marginal::support_upper() const {
  return kind_ == DistKind::uniform ? p2_ : kInf;
}

bool Marginal::in_support(double x) const {
  if (std::isnan(x)) return false;
  switch (kind_) {
    case DistKind::uniform: return x >= p1_ && x <= p2_;
    case DistKind::lognormal: return x > 0.0 && x < kInf;
    case DistKind::weibull: return x >= 0.0 && x < kInf;
    default: return std::isfinite(x);
  }
}

double Marginal::pdf(double x) const {
  switch (kind_) {
    case DistKind::normal:
      return normal_pdf((x - p1_) / p2_) / p2_;
    case DistKind::lognormal:
      if (!(x > 0.0)) return 0.0;
      return normal_pdf((std::log(x) - p1_) / p2_) / (x * p2_);
    case DistKind::uniform:
      return (x >= p1_ && x <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    case DistKind::weibull: {
      if (x < 0.0) return 0.0;
      const double k = p1_;
      const double t = x / p2_;
      if (x == 0.0) {
        if (k < 1.0) return kInf;
        return k == 1.0 ? 1.0 / p2_ : 0.0;
      }
      return (k / p2_) * std::exp((k - 1.0) * std::log(t) - std::pow(t, k));
    }
    case DistKind::gumbel: {
      const double z = (x - p1_) / p2_;
      return std::exp(-(z + std::exp(-z))) / p2_;
    }
  }
  return 0.0;
}

double Marginal::cdf(double x) const {
  switch (kind_) {
    case DistKind::normal:
      return normal_cdf((x - p1_) / p2_);
    case DistKind::lognormal:
      if (!(x > 0.0)) return 0.0;
      return normal_cdf((std::log(x) - p1_) / p2_);
    case DistKind::uniform:
      if (x <= p1_) return 0.0;
      if (x >= p2_) return 1.0;
      return (x - p1_) / (p2_ - p1_);
    case DistKind::weibull:
      if (x <= 0.0) return 0.0;
      return -std::expm1(-std::pow(x / p2_, p1_));
    case DistKind::gumbel:
      return std::exp(-std::exp(-(x - p1_) / p2_));
  }
  return 0.0;
}

double Marginal::sf(double x) const {
  switch (kind_) {
    case DistKind::normal:
      return normal_sf((x - p1_) / p2_);
    case DistKind::lognormal:
      if (!(x > 0.0)) return 1.0;
      return normal_sf((std::log(x) - p1_) / p2_);
    case DistKind::uniform:
      if (x <= p1_) return 1.0;
      if (x >= p2_) return 0.0;
      return (p2_ - x) / (p2_ - p1_);
    case DistKind::weibull:
      if (x <= 0.0) return 1.0;
      return std::exp(-std::pow(x / p2_, p1_));
    case DistKind::gumbel:
      return -std::expm1(-std::exp(-(x - p1_) / p2_));
  }
  return 0.0;
}

double Marginal::ppf(double u) const {
  require_open_unit(u, "Marginal::ppf");
  switch (kind_) {
    case DistKind::normal: return p1_ + p2_ * normal_ppf(u);
    case DistKind::lognormal: return std::exp(p1_ + p2_ * normal_ppf(u));
    case DistKind::uniform: return p1_ + u * (p2_ - p1_);
    case DistKind::weibull: return p2_ * std::pow(-std::log1p(-u), 1.0 / p1_);
    case DistKind::gumbel: return p1_ - p2_ * std::log(-std::log(u));
  }
  return 0.0;
}

double Marginal::isf(double q) const {
  require_open_unit(q, "Marginal::isf");
  switch (kind_) {
    case DistKind::normal: return p1_ - p2_ * normal_ppf(q);
    case DistKind::lognormal: return std::exp(p1_ - p2_ * normal_ppf(q));
    case DistKind::uniform: return p2_ - q * (p2_ - p1_);
    case DistKind::weibull: return p2_ * std::pow(-std::log(q), 1.0 / p1_);
    case DistKind::gumbel: return p1_ - p2_ * std::log(-std::log1p(-q));
  }
  return 0.0;
}

double Marginal::to_standard_normal(double x) const {
  if (!in_support(x)) {
    throw std::domain_error("Marginal: x = " + std::to_string(x) + " outside support of " +
                            std::string(to_string(kind_)));
  }
  switch (kind_) {
    case DistKind::normal: return (x - p1_) / p2_;
    case DistKind::lognormal: return (std::log(x) - p1_) / p2_;
    default: break;
  }
  const double u = cdf(x);
  if (u <= 0.5) return normal_ppf(clamp_unit(u));
  return -normal_ppf(clamp_unit(sf(x)));
}

double Marginal::from_standard_normal(double z) const {
  if (std::isnan(z)) throw std::domain_error("Marginal: NaN standard normal value");
  switch (kind_) {
    case DistKind::normal: return p1_ + p2_ * z;
    case DistKind::lognormal: return std::exp(p1_ + p2_ * z);
    default: break;
  }
  if (z <= 0.0) return ppf(clamp_unit(normal_cdf(z)));
  return isf(clamp_unit(normal_sf(z)));
}

nlohmann::json Marginal::to_json() const {
  if (kind_ == DistKind::uniform) {
    return {{"kind", "uniform"}, {"lower", a_}, {"upper", b_}};
  }
  return {{"kind", std::string(to_string(kind_))}, {"mean", a_}, {"std", b_}};
}

Marginal Marginal::from_json(const nlohmann::json& j) {
  const auto kind = dist_kind_from_string(j.at("kind").get<std::string>());
  if (kind == DistKind::uniform) {
    return from_moments(kind, j.at("lower").get<double>(), j.at("upper").get<double>());
  }
  return from_moments(kind, j.at("mean").get<double>(), j.at("std").get<double>());
}

}  // namespace ukrig
