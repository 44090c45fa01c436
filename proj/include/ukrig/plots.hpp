#pragma once

#include <ostream>
#include <vector>

#include "ukrig/experiment.hpp"

namespace ukrig {

/// Log-scale NMSE per benchmark, one marker with a mean +- std bar per method.
void write_nmse_svg(std::ostream& out, const std::vector<CellSummary>& cells);

/// Log-scale fit time per benchmark and method; filled markers for fd,
/// open markers for analytic gradients.
void write_runtime_svg(std::ostream& out, const std::vector<CellSummary>& cells);

}  // namespace ukrig
