#include "ukrig/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ukrig/distributions.hpp"
#include "ukrig/random.hpp"

namespace ukrig {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dim(const Eigen::VectorXd& x, int p, const char* name) {
  if (x.size() != p) {
    throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(p) + " inputs, got " +
                                std::to_string(x.size()));
  }
}

void require_nonzero(double v, const char* what) {
  if (v == 0.0 || !std::isfinite(v)) throw std::domain_error(std::string(what) + " must be finite and nonzero");
}

Marginal N(double m, double s) { return Marginal::from_moments(DistKind::normal, m, s); }
Marginal LN(double m, double s) { return Marginal::from_moments(DistKind::lognormal, m, s); }
Marginal U(double a, double b) { return Marginal::from_moments(DistKind::uniform, a, b); }
Marginal G(double m, double s) { return Marginal::from_moments(DistKind::gumbel, m, s); }
Marginal W(double m, double s) { return Marginal::from_moments(DistKind::weibull, m, s); }

JointInputModel with_correlation(std::vector<Marginal> marginals, int i, int j, double rho) {
  const auto p = static_cast<Eigen::Index>(marginals.size());
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(p, p);
  R(i, j) = R(j, i) = rho;
  return JointInputModel::build(std::move(marginals), R);
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* key, int size) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (static_cast<int>(v.size()) != size) {
    throw std::invalid_argument(std::string("oakley coefficients: '") + key + "' needs " + std::to_string(size) +
                                " entries");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), size);
}

}  // namespace

OakleyCoefficients OakleyCoefficients::generated(std::uint64_t seed) {
  Rng rng(seed);
  auto draw = [&](double sd) { return sd * normal_ppf(uniform_open(rng)); };
  OakleyCoefficients c;
  c.a1.resize(15);
  c.a2.resize(15);
  c.a3.resize(15);
  c.M.resize(15, 15);
  for (int i = 0; i < 15; ++i) c.a1[i] = draw(0.5);
  for (int i = 0; i < 15; ++i) c.a2[i] = draw(0.5);
  for (int i = 0; i < 15; ++i) c.a3[i] = draw(0.5);
  for (int r = 0; r < 15; ++r) {
    for (int k = 0; k < 15; ++k) c.M(r, k) = draw(0.2);
  }
  return c;
}

OakleyCoefficients OakleyCoefficients::from_json(const nlohmann::json& j) {
  OakleyCoefficients c;
  c.a1 = vector_from_json(j, "a1", 15);
  c.a2 = vector_from_json(j, "a2", 15);
  c.a3 = vector_from_json(j, "a3", 15);
  const auto rows = j.at("M").get<std::vector<std::vector<double>>>();
  if (rows.size() != 15) throw std::invalid_argument("oakley coefficients: 'M' needs 15 rows");
  c.M.resize(15, 15);
  for (int r = 0; r < 15; ++r) {
    if (rows[r].size() != 15) throw std::invalid_argument("oakley coefficients: 'M' rows need 15 entries");
    for (int k = 0; k < 15; ++k) c.M(r, k) = rows[r][k];
  }
  return c;
}

nlohmann::json OakleyCoefficients::to_json() const {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < M.rows(); ++r) rows.push_back(vec(M.row(r).transpose()));
  return {{"a1", vec(a1)}, {"a2", vec(a2)}, {"a3", vec(a3)}, {"M", rows}};
}

Eigen::VectorXd Benchmark::evaluate_rows(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) y[i] = evaluate(X.row(i).transpose());
  return y;
}

double oakley_ohagan_1d(const Eigen::VectorXd& x) {
  require_dim(x, 1, "oakley_ohagan_1d");
  return 5.0 + x[0] + std::cos(x[0]);
}

double lognormal_ratio(const Eigen::VectorXd& x) {
  require_dim(x, 2, "lognormal_ratio");
  require_nonzero(x[1], "lognormal_ratio: x2");
  return x[0] / x[1];
}

double webster(const Eigen::VectorXd& x) {
  require_dim(x, 2, "webster");
  return x[0] * x[0] + x[1] * x[1] * x[1];
}

double short_column(const Eigen::VectorXd& x) {
  require_dim(x, 3, "short_column");
  require_nonzero(x[0], "short_column: x1");
  const double r = x[2] / x[0];
  return 1.0 - 4.0 / 1125.0 * x[1] / x[0] - r * r / 5625.0;
}

double cantilever_beam(const Eigen::VectorXd& x) {
  require_dim(x, 3, "cantilever_beam");
  require_nonzero(x[0], "cantilever_beam: x1");
  return 5e5 / x[0] * std::hypot(x[1] / 16.0, x[2] / 4.0);
}

double borehole(const Eigen::VectorXd& x) {
  require_dim(x, 8, "borehole");
  const double ratio = x[1] / x[0];
  if (!(ratio > 0.0) || ratio == 1.0) throw std::domain_error("borehole: x2/x1 must be positive and != 1");
  const double log_ratio = std::log(ratio);
  const double denom =
      log_ratio * (1.0 + 2.0 * x[6] * x[2] / (log_ratio * x[0] * x[0] * x[7]) + x[2] / x[4]);
  return 2.0 * kPi * x[2] * (x[3] - x[5]) / denom;
}

double steel_column(const Eigen::VectorXd& x) {
  require_dim(x, 9, "steel_column");
  const double P = x[1] + x[2] + x[3];
  const double Eb = 8.0 * kPi * kPi / 9e8 * x[4] * x[5] * x[6] * x[6] * x[8];
  if (Eb == P) throw std::domain_error("steel_column: Eb == P");
  return x[0] - P / (2.0 * x[4] * x[5]) - x[7] * P * Eb / (x[4] * x[5] * x[6] * (Eb - P));
}

double sulfur_model(const Eigen::VectorXd& x) {
  require_dim(x, 9, "sulfur_model");
  return -5.488e-9 * x[0] * x[0] * x[1] * x[2] * x[2] * x[3] * x[4] * x[5] * x[6] * x[7] * x[8];
}

double oakley_ohagan_15d(const OakleyCoefficients& c, const Eigen::VectorXd& x) {
  require_dim(x, 15, "oakley_ohagan_15d");
  return c.a1.dot(x) + c.a2.dot(x.array().sin().matrix()) + c.a3.dot(x.array().cos().matrix()) +
         x.dot(c.M * x);
}

std::vector<Benchmark> registry(const OakleyCoefficients* oakley) {
  std::vector<Benchmark> all;
  all.push_back({1, "oakley-ohagan-1d", 1, oakley_ohagan_1d, JointInputModel::independent({N(0, 4)})});
  all.push_back({2, "lognormal-ratio", 2, lognormal_ratio, with_correlation({LN(1, 0.5), LN(1, 0.5)}, 0, 1, 0.3)});
  all.push_back({3, "webster", 2, webster, JointInputModel::independent({U(1, 10), N(2, 1)})});
  all.push_back({4, "short-column", 3, short_column,
                 with_correlation({LN(5, 0.5), N(2000, 400), N(500, 100)}, 1, 2, 0.5)});
  all.push_back({5, "cantilever-beam", 3, cantilever_beam,
                 JointInputModel::independent({N(2.9e7, 1.45e6), N(1000, 100), N(500, 100)})});
  all.push_back({6, "borehole", 8, borehole,
                 JointInputModel::independent({N(0.1, 0.0162), LN(3700, 4890), U(63070, 115600), U(990, 1110),
                                               U(63.1, 116), U(700, 820), U(1120, 1680), U(9855, 12045)})});
  all.push_back({7, "steel-column", 9, steel_column,
                 JointInputModel::independent({LN(400, 35), N(5e5, 5e4), G(6e5, 9e4), G(6e5, 9e4), LN(300, 3),
                                               LN(20, 2), LN(300, 5), N(30, 10), W(2.1e5, 4200)})});
  all.push_back({8, "sulfur-model", 9, sulfur_model,
                 JointInputModel::independent({LN(0.76, 0.152), LN(0.39, 0.039), LN(0.85, 0.085), LN(0.3, 0.09),
                                               LN(5.0, 2.0), LN(1.7, 0.34), LN(71.0, 10.65), LN(0.5, 0.25),
                                               LN(5.5, 2.75)})});
  const OakleyCoefficients coeffs = oakley ? *oakley : OakleyCoefficients::generated();
  all.push_back({9, "oakley-ohagan-15d", 15,
                 [coeffs](const Eigen::VectorXd& x) { return oakley_ohagan_15d(coeffs, x); },
                 JointInputModel::independent(std::vector<Marginal>(15, N(0, 1)))});
  return all;
}

const Benchmark& find_benchmark(const std::vector<Benchmark>& all, int id) {
  for (const auto& b : all) {
    if (b.id == id) return b;
  }
  throw std::invalid_argument("unknown benchmark id " + std::to_string(id));
}

const Benchmark& find_benchmark(const std::vector<Benchmark>& all, std::string_view key) {
  if (!key.empty() && key.find_first_not_of("0123456789") == std::string_view::npos) {
    return find_benchmark(all, std::stoi(std::string(key)));
  }
  for (const auto& b : all) {
    if (b.name == key) return b;
  }
  throw std::invalid_argument("unknown benchmark '" + std::string(key) + "'");
}

}  // namespace ukrig
