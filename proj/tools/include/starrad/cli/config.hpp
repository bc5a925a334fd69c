#pragma once

// Experiment configuration: an INI file with exactly one of a [quadrature]
// or a [pinn] section, an optional [constants] section (pinn only) and an
// optional [output] section. Unknown sections and keys are rejected.
//
//   [pinn]
//   problem = brinkman
//   criteria = res, hessian, unif
//   seeds = 0, 1, 2
//   epochs = 7000
//
// Every pinn field left out falls back to the problem's preset.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "starrad/sampling.hpp"
#include "starrad/training.hpp"

namespace starrad::cli {

struct QuadratureSettings {
    std::string function = "example1";
    int n = 25;
    int k = 10;
    int samples = 100;
    std::vector<int> sweep_k;  // empty: no sweep
    int sweep_n_min = 0;       // 0: start each sweep at N = k
    int sweep_n_max = 200;
};

struct PinnSettings {
    train::TrainConfig base;  // criterion and seed are overwritten per run
    std::vector<sampling::CriterionKind> criteria;
    std::vector<std::uint64_t> seeds;
    std::vector<int> checkpoints;  // epochs listed in the comparison csv; empty: every recorded row
    unsigned threads = 0;          // 0: hardware concurrency
};

struct OutputSettings {
    std::filesystem::path directory = "out";
    bool emit_plots = false;
};

struct ExperimentConfig {
    std::variant<QuadratureSettings, PinnSettings> mode;
    OutputSettings output;

    bool is_quadrature() const noexcept { return mode.index() == 0; }
    const QuadratureSettings& quadrature() const { return std::get<QuadratureSettings>(mode); }
    const PinnSettings& pinn() const { return std::get<PinnSettings>(mode); }
    PinnSettings& pinn() { return std::get<PinnSettings>(mode); }
};

/// Throws ConfigError on syntax errors, unknown keys, bad values, or a file
/// that is neither (or both) quadrature and pinn.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<sampling::CriterionKind> parse_criterion_list(const std::string& text);

}  // namespace starrad::cli
