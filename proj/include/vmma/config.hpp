#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmma/fourier.hpp"
#include "vmma/simulate.hpp"

namespace vmma {

/// Any schema or validation problem in an experiment config; the CLI maps
/// these to exit code 1 (everything else that throws is a numeric failure,
/// exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::size_t n_reps = 1000;
    std::uint64_t master_seed = 1;
    std::vector<double> thetas;            // CF evaluation angles
    std::vector<std::vector<double>> lags; // covariance lags (on-grid)
    std::vector<double> mss_exponents;     // Lamperti H
    std::vector<double> theta_grid;        // uniform positive grid for reports
};

struct OutputConfig {
    std::filesystem::path dir = "out";
};

struct DesignConfig {
    CovarianceTable covariance;
    SpectralRoot root = SpectralRoot::even;
};

/// Parsed and fully validated experiment description. Model and grid are
/// optional because the design-kernel command needs neither; commands check
/// for the blocks they require.
struct ExperimentConfig {
    std::optional<SimulationModel> model;
    std::optional<GridSpec> target;
    double truncation_tol = 1e-6;
    RunConfig run;
    OutputConfig output;
    std::optional<DesignConfig> design;
};

/// Parses the JSON config text; every constructor precondition of the
/// referenced modules runs here, and unknown keys anywhere are rejected.
/// Relative file references (tabulated kernel CSVs) resolve against base_dir.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = ".");

/// parse_config over the file's contents.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of the model block (used for sidecar model hashes).
std::string model_fingerprint(const SimulationModel& model);

} // namespace vmma
