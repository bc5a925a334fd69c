#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "starrad/cli/config.hpp"

namespace starrad::cli {

using FileList = std::vector<std::filesystem::path>;

/// Per-interval plan and summary CSVs for (N, k); with sweep_k set, also a
/// sweep CSV and, if requested, a plot script. Returns the files written.
FileList cmd_quad(const QuadratureSettings& settings, const OutputSettings& output, std::ostream& log);

/// One trace CSV per (criterion, seed), a comparison CSV, and for poisson2d
/// a squared-error field per run. Throws ConfigError before training if any
/// run's config is invalid.
FileList cmd_pinn(const PinnSettings& settings, const OutputSettings& output, std::ostream& log);

}  // namespace starrad::cli
