#pragma once

#include "pfdyn/state.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pfdyn {

/// Named generator of initial data.
///
///   constant       theta ≡ theta, chi ≡ chi
///   mode           theta (1 + theta_amplitude sin(k pi x / L)), chi + chi_amplitude cos(k pi x / L)
///   random_smooth  theta spans [theta_min, theta_max] in log scale, chi + chi_amplitude f
///   file           snapshot at `path`
///
/// `noise` adds uniform noise of that amplitude to chi. Randomness comes from the seed only.
struct InitialRecipe {
    std::string kind = "constant";
    double theta = 1.0;
    double chi = 1.0;
    double theta_amplitude = 0.0;
    double chi_amplitude = 0.0;
    int mode = 1;
    double theta_min = 0.5;
    double theta_max = 2.0;
    int modes = 4;
    std::string path;
    double noise = 0.0;

    /// Every violated constraint, prefixed with "initial.".
    std::vector<std::string> validate() const;
};

State make_initial_state(std::shared_ptr<const Discretization> disc, const InitialRecipe& recipe,
                         std::uint64_t seed);

/// Random combination of the lowest `modes` cosine modes per axis, affinely mapped so
/// that its minimum is -1 and maximum +1 (zero if the combination is constant).
/// Full-grid values, or interior values when `interior` is set.
Field random_smooth_field(const Grid& grid, int modes, std::mt19937_64& rng, bool interior);

}  // namespace pfdyn
