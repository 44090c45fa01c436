#include "ukrig/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "ukrig/benchmarks.hpp"
#include "ukrig/experiment.hpp"
#include "ukrig/gradcheck.hpp"
#include "ukrig/kernel.hpp"
#include "ukrig/plots.hpp"

#ifndef UKRIG_VERSION
#define UKRIG_VERSION "dev"
#endif

namespace ukrig {

namespace {

const std::vector<std::string> kAllMethods{"zero", "constant", "linear", "quadratic", "t-linear", "t-quadratic"};
const std::vector<std::string> kMethodTitles{"simple",         "ordinary",           "linear",
                                             "quadratic",      "transf. linear",     "transf. quadratic"};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    parts.push_back(cur);
  }
  return parts;
}

std::string canonical_method(const std::string& token) {
  try {
    return std::string(to_token(trend_kind_from_token(token)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<int> benchmark_list(const nlohmann::json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9};
    return parse_int_list(v.get<std::string>());
  }
  if (!v.is_array()) throw ConfigError("'benchmarks' must be \"all\" or a list of ids");
  std::vector<int> ids;
  const auto all = registry();
  for (const auto& e : v) {
    if (e.is_number_integer()) {
      ids.push_back(e.get<int>());
    } else if (e.is_string()) {
      try {
        ids.push_back(find_benchmark(all, e.get<std::string>()).id);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
    } else {
      throw ConfigError("'benchmarks' entries must be ids or names");
    }
  }
  return ids;
}

std::vector<std::string> method_list(const nlohmann::json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "all") return kAllMethods;
    std::vector<std::string> out;
    for (const auto& t : split(v.get<std::string>(), ',')) out.push_back(canonical_method(t));
    return out;
  }
  if (!v.is_array()) throw ConfigError("'methods' must be \"all\" or a list of tokens");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigError("'methods' entries must be strings");
    out.push_back(canonical_method(e.get<std::string>()));
  }
  return out;
}

void validate(const RunConfig& c) {
  if (c.benchmarks.empty()) throw ConfigError("no benchmarks selected");
  for (int id : c.benchmarks) {
    if (id < 1 || id > 9) throw ConfigError("benchmark id out of range: " + std::to_string(id));
  }
  if (c.methods.empty()) throw ConfigError("no methods selected");
  if (c.n < 0) throw ConfigError("n must be >= 0");
  if (c.n_val < 2) throw ConfigError("n_val must be >= 2");
  if (c.reps < 1) throw ConfigError("reps must be >= 1");
  if (c.restarts < 1) throw ConfigError("restarts must be >= 1");
  if (c.lhs_budget < 0) throw ConfigError("lhs_budget must be >= 0");
  if (c.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(c.grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.grad_mode != "analytic" && c.grad_mode != "fd" && c.grad_mode != "both") {
    throw ConfigError("grad_mode must be analytic, fd or both");
  }
  if (c.selection != "validation" && c.selection != "likelihood") {
    throw ConfigError("selection must be validation or likelihood");
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// Reads records.csv into rows keyed by column name; '#' lines are metadata.
std::vector<std::map<std::string, std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  if (header.empty()) throw ConfigError(path + ": empty records file");
  for (const char* col : {"benchmark", "method", "nmse"}) {
    if (std::find(header.begin(), header.end(), col) == header.end()) {
      throw ConfigError(path + ": missing column '" + col + "'");
    }
  }
  if (rows.empty()) throw ConfigError(path + ": no records");
  return rows;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  return {{"benchmarks", benchmarks}, {"methods", methods},       {"n", n},
          {"n_val", n_val},           {"reps", reps},             {"restarts", restarts},
          {"seed", seed},             {"grad_mode", grad_mode},   {"selection", selection},
          {"lhs_budget", lhs_budget}, {"max_iters", max_iters},   {"grad_tol", grad_tol},
          {"oakley_coefficients", oakley_coefficients},           {"out", out},
          {"plot", plot},             {"timing", timing},         {"jobs", jobs}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "benchmarks") c.benchmarks = benchmark_list(v);
      else if (key == "methods") c.methods = method_list(v);
      else if (key == "n") c.n = v.get<int>();
      else if (key == "n_val") c.n_val = v.get<int>();
      else if (key == "reps") c.reps = v.get<int>();
      else if (key == "restarts") c.restarts = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "grad_mode") c.grad_mode = v.get<std::string>();
      else if (key == "selection") c.selection = v.get<std::string>();
      else if (key == "lhs_budget") c.lhs_budget = v.get<int>();
      else if (key == "max_iters") c.max_iters = v.get<int>();
      else if (key == "grad_tol") c.grad_tol = v.get<double>();
      else if (key == "oakley_coefficients") c.oakley_coefficients = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "plot") c.plot = v.get<bool>();
      else if (key == "timing") c.timing = v.get<bool>();
      else if (key == "jobs") c.jobs = v.get<int>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  validate(c);
  return c;
}

std::string RunConfig::hash() const {
  nlohmann::json j = to_json();
  j.erase("out");
  j.erase("plot");
  j.erase("jobs");
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("not an integer: '" + part + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string format_sci3(double v) {
  if (!std::isfinite(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2E", v);
  return buf;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
  } catch (const ConfigError& e) {
    err << "ukrig run: " << e.what() << '\n';
    return 2;
  }
  try {
    std::optional<OakleyCoefficients> oakley;
    if (!config.oakley_coefficients.empty()) {
      std::ifstream f(config.oakley_coefficients);
      if (!f) throw std::runtime_error("cannot open " + config.oakley_coefficients);
      oakley = OakleyCoefficients::from_json(nlohmann::json::parse(f));
    }
    const auto all = registry(oakley ? &*oakley : nullptr);
    std::vector<const Benchmark*> benches;
    for (int id : config.benchmarks) benches.push_back(&find_benchmark(all, id));
    std::vector<TrendKind> methods;
    for (const auto& m : config.methods) methods.push_back(trend_kind_from_token(m));
    std::vector<GradMode> modes;
    if (config.grad_mode == "both") modes = {GradMode::analytic, GradMode::fd};
    else modes = {grad_mode_from_string(config.grad_mode)};

    ExperimentConfig ec;
    ec.n = config.n;
    ec.n_val = config.n_val;
    ec.reps = config.reps;
    ec.restarts = config.restarts;
    ec.seed = config.seed;
    ec.selection = selection_from_string(config.selection);
    ec.lhs_budget = config.lhs_budget;
    ec.max_iters = config.max_iters;
    ec.grad_tol = config.grad_tol;
    ec.jobs = config.jobs;

    const std::size_t total = benches.size() * methods.size() * modes.size() * config.reps;
    std::size_t done = 0;
    const auto records = run_grid(benches, methods, modes, ec, [&](const ExperimentRecord& r) {
      ++done;
      err << '[' << done << '/' << total << "] #" << r.benchmark << ' ' << r.method << ' ' << to_string(r.grad_mode)
          << " rep " << r.rep << ": ";
      if (r.failed) err << "FAILED (" << r.error << ")\n";
      else err << "nmse " << format_sci3(r.nmse) << ", " << r.fit_seconds << " s\n";
    });

    const std::filesystem::path dir(config.out);
    std::filesystem::create_directories(dir);
    const OutputMetadata meta{UKRIG_VERSION, config.seed, config.hash()};
    {
      std::ofstream f(dir / "records.csv", std::ios::binary);
      write_records_csv(f, records, meta, config.timing);
      if (!f) throw std::runtime_error("failed writing records.csv");
    }
    {
      std::ofstream f(dir / "timings.csv", std::ios::binary);
      write_timings_csv(f, records, meta);
    }
    const auto cells = summarize(records);
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& r : records) {
      if (r.failed) {
        failures.push_back({{"benchmark", r.benchmark}, {"method", r.method}, {"rep", r.rep},
                            {"grad_mode", std::string(to_string(r.grad_mode))}, {"error", r.error}});
      }
    }
    nlohmann::json summary = {
        {"metadata",
         {{"tool", "ukrig"},
          {"version", UKRIG_VERSION},
          {"seed", config.seed},
          {"config_hash", meta.config_hash},
          {"config", config.to_json()},
          {"jobs", config.jobs},
          {"parallelism", "repetitions in parallel up to jobs, restarts sequential"},
          {"omp_max_threads", omp_get_max_threads()},
          {"optimizer",
           {{"max_iters", config.max_iters}, {"grad_tol", config.grad_tol}, {"rel_tol", 1e-10}, {"memory", 10},
            {"fd_step", 1e-6}}}}},
        {"cells", summary_to_json(cells)},
        {"failures", failures}};
    {
      std::ofstream f(dir / "summary.json", std::ios::binary);
      f << summary.dump(2) << '\n';
    }
    if (config.plot) {
      std::ofstream f1(dir / "nmse.svg", std::ios::binary);
      write_nmse_svg(f1, cells);
      std::ofstream f2(dir / "runtime.svg", std::ios::binary);
      write_runtime_svg(f2, cells);
    }
    out << "wrote " << (records.size() - failures.size()) << " records to " << (dir / "records.csv").string();
    if (!failures.empty()) out << " (" << failures.size() << " failed, see summary.json)";
    out << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "ukrig run: " << e.what() << '\n';
    return 1;
  }
}

int cmd_validate_gradients(const std::vector<int>& dims, std::uint64_t seed, bool inject_sign_error,
                           std::ostream& out, std::ostream& err) {
  if (dims.empty()) {
    err << "validate-gradients: empty dimension list\n";
    return 2;
  }
  for (int p : dims) {
    if (p < 1) {
      err << "validate-gradients: dimensions must be >= 1\n";
      return 2;
    }
  }
  constexpr double kTol = 1e-5;
  const bool previous = fault_injection::amplitude_gradient_sign_error();
  fault_injection::set_amplitude_gradient_sign_error(inject_sign_error);
  bool ok = true;
  try {
    char line[128];
    for (int p : dims) {
      for (const auto& token : kAllMethods) {
        const TrendKind kind = trend_kind_from_token(token);
        if (basis_count(kind, p) >= 10 * p) {
          out << token << " p=" << p << ": skipped (q >= n)\n";
          continue;
        }
        const GradientCheck c = check_gradients(kind, p, seed);
        const bool pass = c.max_rel_error < kTol;
        ok = ok && pass;
        std::snprintf(line, sizeof line, "%-12s p=%-3d max_rel_err=%.3e %s\n", token.c_str(), p, c.max_rel_error,
                      pass ? "ok" : "FAIL");
        out << line;
      }
    }
  } catch (const std::exception& e) {
    fault_injection::set_amplitude_gradient_sign_error(previous);
    err << "validate-gradients: " << e.what() << '\n';
    return 1;
  }
  fault_injection::set_amplitude_gradient_sign_error(previous);
  return ok ? 0 : 1;
}

int cmd_table(const std::string& records_path, const std::string& markdown_path, std::ostream& out,
              std::ostream& err) {
  std::vector<std::map<std::string, std::string>> rows;
  try {
    rows = read_csv(records_path);
  } catch (const ConfigError& e) {
    err << "table: " << e.what() << '\n';
    return 2;
  }
  // Mean NMSE per (benchmark, method); analytic rows when present.
  const bool has_mode = rows.front().count("grad_mode") > 0;
  bool any_analytic = false;
  for (const auto& r : rows) any_analytic = any_analytic || (has_mode && r.at("grad_mode") == "analytic");
  std::map<std::pair<int, std::string>, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    if (any_analytic && r.at("grad_mode") != "analytic") continue;
    try {
      const int b = std::stoi(r.at("benchmark"));
      const double e = std::stod(r.at("nmse"));
      auto& a = acc[{b, canonical_method(r.at("method"))}];
      a.first += e;
      a.second += 1;
    } catch (const std::exception& e) {
      err << "table: bad record (" << e.what() << ")\n";
      return 2;
    }
  }

  std::ostringstream md;
  md << "| # |";
  for (const auto& t : kMethodTitles) md << ' ' << t << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < kMethodTitles.size(); ++i) md << "---|";
  md << '\n';
  for (int b = 1; b <= 9; ++b) {
    md << "| " << b << " |";
    for (const auto& m : kAllMethods) {
      const auto it = acc.find({b, m});
      md << ' ' << (it == acc.end() ? std::string("-") : format_sci3(it->second.first / it->second.second)) << " |";
    }
    md << '\n';
  }
  out << md.str();
  const std::string target =
      markdown_path.empty() ? (std::filesystem::path(records_path).parent_path() / "table.md").string() : markdown_path;
  std::ofstream f(target, std::ios::binary);
  if (!f) {
    err << "table: cannot write " << target << '\n';
    return 1;
  }
  f << md.str();
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Universal kriging with Rosenblatt-transformed trends", "ukrig"};
  app.set_version_flag("--version", std::string(UKRIG_VERSION));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a benchmark x method experiment grid");
  std::string config_path;
  std::optional<std::string> o_benchmarks, o_methods, o_grad_mode, o_selection, o_out, o_oakley;
  std::optional<int> o_reps, o_restarts, o_n, o_n_val, o_jobs;
  std::optional<std::uint64_t> o_seed;
  bool f_plot = false, f_timing = false;
  run->add_option("config", config_path, "JSON config file");
  run->add_option("--benchmarks", o_benchmarks, "ids or names, comma separated, or 'all'");
  run->add_option("--methods", o_methods, "trend tokens, comma separated, or 'all'");
  run->add_option("--reps", o_reps);
  run->add_option("--restarts", o_restarts);
  run->add_option("--n", o_n, "training points (0 means 10 p)");
  run->add_option("--n-val", o_n_val);
  run->add_option("--seed", o_seed);
  run->add_option("--grad-mode", o_grad_mode, "analytic | fd | both");
  run->add_option("--selection", o_selection, "validation | likelihood");
  run->add_option("--oakley-coefficients", o_oakley, "JSON coefficients for benchmark 9");
  run->add_option("--out", o_out, "output directory (default: $UKRIG_OUT_DIR or ./results)");
  run->add_option("--jobs", o_jobs, "repetitions run in parallel");
  run->add_flag("--plot", f_plot, "write nmse.svg and runtime.svg");
  run->add_flag("--timing", f_timing, "write measured fit_seconds into records.csv");

  auto* vg = app.add_subcommand("validate-gradients", "Compare analytic and finite-difference LML gradients");
  std::string dims_text = "1,3,8,9,15";
  std::uint64_t vg_seed = 1;
  bool inject = false;
  vg->add_option("--dims", dims_text, "comma separated dimensions");
  vg->add_option("--seed", vg_seed);
  vg->add_flag("--inject-sign-error", inject, "flip the sign of dK/dlog(theta0) (self test)");

  auto* table = app.add_subcommand("table", "Render the mean NMSE table from records.csv");
  std::string records_path, md_path;
  table->add_option("records", records_path, "records.csv")->required();
  table->add_option("--out", md_path, "markdown output (default: table.md next to records.csv)");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    app.exit(e, out, err);
    return 2;
  }

  if (*run) {
    RunConfig config;
    try {
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("cannot open config " + config_path);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
          throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        config = RunConfig::from_json(j);
      }
      if (const char* env = std::getenv("UKRIG_OUT_DIR"); env != nullptr && *env != '\0') config.out = env;
      if (o_benchmarks) config.benchmarks = benchmark_list(nlohmann::json(*o_benchmarks));
      if (o_methods) config.methods = method_list(nlohmann::json(*o_methods));
      if (o_reps) config.reps = *o_reps;
      if (o_restarts) config.restarts = *o_restarts;
      if (o_n) config.n = *o_n;
      if (o_n_val) config.n_val = *o_n_val;
      if (o_seed) config.seed = *o_seed;
      if (o_grad_mode) config.grad_mode = *o_grad_mode;
      if (o_selection) config.selection = *o_selection;
      if (o_oakley) config.oakley_coefficients = *o_oakley;
      if (o_out) config.out = *o_out;
      if (o_jobs) config.jobs = *o_jobs;
      if (f_plot) config.plot = true;
      if (f_timing) config.timing = true;
      validate(config);
    } catch (const ConfigError& e) {
      err << "ukrig run: " << e.what() << '\n';
      return 2;
    }
    return cmd_run(config, out, err);
  }
  if (*vg) {
    std::vector<int> dims;
    try {
      dims = parse_int_list(dims_text);
    } catch (const ConfigError& e) {
      err << "validate-gradients: " << e.what() << '\n';
      return 2;
    }
    return cmd_validate_gradients(dims, vg_seed, inject, out, err);
  }
  return cmd_table(records_path, md_path, out, err);
}

}  // namespace ukrig
