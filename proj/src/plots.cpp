#include "ukrig/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

namespace ukrig {

namespace {

constexpr double kWidth = 960, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 30, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Axes {
  double lo, hi;  // decades
  double y(double v) const {
    const double t = (std::log10(v) - lo) / (hi - lo);
    return kTop + (1.0 - t) * (kHeight - kTop - kBottom);
  }
};

Axes log_axes(const std::vector<double>& values) {
  double lo = 1e300, hi = -1e300;
  for (double v : values) {
    if (v > 0.0 && std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo > hi) return {-1, 0};
  return {std::floor(std::log10(lo)), std::max(std::ceil(std::log10(hi)), std::floor(std::log10(lo)) + 1)};
}

void frame(std::ostream& out, const Axes& ax, const std::vector<int>& benches, const char* ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double x0 = kLeft, x1 = kWidth - kRight;
  for (int d = static_cast<int>(ax.lo); d <= static_cast<int>(ax.hi); ++d) {
    const double y = ax.y(std::pow(10.0, d));
    out << "<line x1=\"" << x0 << "\" x2=\"" << x1 << "\" y1=\"" << y << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  const double slot = (x1 - x0) / std::max<std::size_t>(1, benches.size());
  for (std::size_t b = 0; b < benches.size(); ++b) {
    out << "<text x=\"" << x0 + (b + 0.5) * slot << "\" y=\"" << kHeight - kBottom + 20
        << "\" text-anchor=\"middle\">#" << benches[b] << "</text>\n";
  }
  out << "<rect x=\"" << x0 << "\" y=\"" << kTop << "\" width=\"" << x1 - x0 << "\" height=\""
      << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text transform=\"translate(18," << kHeight / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel
      << "</text>\n";
}

void legend(std::ostream& out, const std::vector<std::string>& methods) {
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const double y = kTop + 16 * m + 8;
    out << "<circle cx=\"" << kWidth - kRight + 16 << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << kColors[m % 7]
        << "\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 26 << "\" y=\"" << y + 4 << "\">" << methods[m] << "</text>\n";
  }
}

template <class T>
std::vector<T> unique_in_order(const std::vector<CellSummary>& cells, T CellSummary::*field) {
  std::vector<T> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.*field) == out.end()) out.push_back(c.*field);
  }
  return out;
}

}  // namespace

void write_nmse_svg(std::ostream& out, const std::vector<CellSummary>& all) {
  std::vector<CellSummary> cells;
  for (const auto& c : all) {
    if (c.grad_mode == GradMode::analytic || std::none_of(all.begin(), all.end(), [&](const CellSummary& o) {
          return o.grad_mode == GradMode::analytic && o.benchmark == c.benchmark && o.method == c.method;
        })) {
      cells.push_back(c);
    }
  }
  const auto benches = unique_in_order(cells, &CellSummary::benchmark);
  const auto methods = unique_in_order(cells, &CellSummary::method);
  std::vector<double> vals;
  for (const auto& c : cells) {
    vals.push_back(c.nmse_mean);
    vals.push_back(c.nmse_mean + c.nmse_std);
    if (c.nmse_mean - c.nmse_std > 0) vals.push_back(c.nmse_mean - c.nmse_std);
  }
  const Axes ax = log_axes(vals);
  frame(out, ax, benches, "NMSE");
  const double slot = (kWidth - kRight - kLeft) / std::max<std::size_t>(1, benches.size());
  for (const auto& c : cells) {
    if (!(c.nmse_mean > 0.0)) continue;
    const auto b = std::find(benches.begin(), benches.end(), c.benchmark) - benches.begin();
    const auto m = std::find(methods.begin(), methods.end(), c.method) - methods.begin();
    const double x = kLeft + b * slot + (m + 1.0) * slot / (methods.size() + 1.0);
    const double lo = c.nmse_mean - c.nmse_std > 0 ? c.nmse_mean - c.nmse_std : std::pow(10.0, ax.lo);
    out << "<line x1=\"" << x << "\" x2=\"" << x << "\" y1=\"" << fmt("%.2f", ax.y(lo)) << "\" y2=\""
        << fmt("%.2f", ax.y(c.nmse_mean + c.nmse_std)) << "\" stroke=\"" << kColors[m % 7] << "\"/>\n";
    out << "<circle cx=\"" << x << "\" cy=\"" << fmt("%.2f", ax.y(c.nmse_mean)) << "\" r=\"4\" fill=\""
        << kColors[m % 7] << "\"/>\n";
  }
  legend(out, methods);
  out << "</svg>\n";
}

void write_runtime_svg(std::ostream& out, const std::vector<CellSummary>& cells) {
  const auto benches = unique_in_order(cells, &CellSummary::benchmark);
  const auto methods = unique_in_order(cells, &CellSummary::method);
  std::vector<double> vals;
  for (const auto& c : cells) vals.push_back(c.seconds_mean);
  const Axes ax = log_axes(vals);
  frame(out, ax, benches, "fit time [s]");
  const double slot = (kWidth - kRight - kLeft) / std::max<std::size_t>(1, benches.size());
  for (const auto& c : cells) {
    if (!(c.seconds_mean > 0.0)) continue;
    const auto b = std::find(benches.begin(), benches.end(), c.benchmark) - benches.begin();
    const auto m = std::find(methods.begin(), methods.end(), c.method) - methods.begin();
    const double x = kLeft + b * slot + (m + 1.0) * slot / (methods.size() + 1.0);
    const char* color = kColors[m % 7];
    const bool fd = c.grad_mode == GradMode::fd;
    out << "<circle cx=\"" << x << "\" cy=\"" << fmt("%.2f", ax.y(c.seconds_mean)) << "\" r=\"4\" fill=\""
        << (fd ? color : "white") << "\" stroke=\"" << color << "\"/>\n";
  }
  legend(out, methods);
  out << "<text x=\"" << kWidth - kRight + 10 << "\" y=\"" << kHeight - kBottom
      << "\">filled: fd, open: analytic</text>\n";
  out << "</svg>\n";
}

}  // namespace ukrig
