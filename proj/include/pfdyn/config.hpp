#pragma once

#include "pfdyn/model.hpp"
#include "pfdyn/recipes.hpp"
#include "pfdyn/stationary.hpp"
#include "pfdyn/stepper.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pfdyn {

struct GridSpec {
    int dim = 1;
    double extent = 1.0;
    int n = 64;
};

struct PotentialSpec {
    std::string name = "double_well";  // or "polynomial"
    std::vector<double> coefficients;  // c_0, c_1, ... for "polynomial"
    double lambda = 4.0;

    Potential build() const;
};

struct RunSection {
    double t_end = 1.0;
    long snapshot_every = 0;
    long checkpoint_every = 0;
    std::uint64_t seed = 0;
    bool csv = false;
};

struct BundleSection {
    int members = 8;
    double radius = 0.1;   // target d_X radius around the reference state
    int modes = 4;         // smoothness of the perturbation directions
    double ell = 0.25;     // squeezing window
    int squeeze_modes = 4;
    double gamma = 0.125;
    double tail_fraction = 0.5;
    double contraction_tol = 1e-6;
};

/// Everything a subcommand needs. Sections: [grid] [potential] [step] [initial]
/// [run] [metric] [bundle] [catalog].
struct RunConfig {
    GridSpec grid;
    PotentialSpec potential;
    StepConfig step;
    InitialRecipe initial;
    RunSection run;
    MetricParams metric;
    BundleSection bundle;
    CatalogSeeds catalog;
    /// Non-fatal findings, e.g. dt above 2 / lambda.
    std::vector<std::string> warnings;

    /// Round-trippable INI text of the effective configuration.
    std::string to_ini() const;
};

/// Parses INI text strictly: unknown sections or keys are errors. Throws ConfigError
/// listing every violation. Relative file paths are resolved against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Reads and parses a file; IoError when it cannot be read.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace pfdyn
