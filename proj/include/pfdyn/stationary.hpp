#pragma once

#include "pfdyn/model.hpp"

#include <string>
#include <vector>

namespace pfdyn {

/// Stationary point (theta ≡ 1, chi) of the system: chi solves
/// B chi + W'(chi) - chi = 0 with the Neumann closure.
struct Equilibrium {
    Field chi;
    double residual_norm = 0.0;        // max-norm of B chi + W'(chi) - chi
    double smallest_eigenvalue = 0.0;  // of B + diag(W''(chi) - 1)
    std::string stability;             // "stable", "unstable" or "marginal"
    std::string label;                 // "constant +1", "kink", ...
    int newton_iterations = 0;
};

struct EquilibriumOptions {
    double tol = 1e-10;
    int max_iters = 100;
    /// |smallest eigenvalue| below this is tagged "marginal".
    double marginal_tol = 1e-8;
};

/// B chi + W'(chi) - chi on all nodes.
Field equilibrium_residual(const Discretization& disc, const Potential& potential,
                           const Field& chi);

/// Damped Newton from `guess`. Throws NumericalError carrying the last residual
/// when max_iters iterations do not reach tol.
Equilibrium solve_equilibrium(const Discretization& disc, const Potential& potential,
                              const Field& guess, const EquilibriumOptions& options = {});

/// Smallest eigenvalue of the linearization B + diag(W''(chi) - 1), self-adjoint in
/// the quadrature inner product. Throws CapabilityError above the spectral node cap.
double smallest_linearized_eigenvalue(const Discretization& disc, const Potential& potential,
                                      const Field& chi);

/// Seeds for catalog construction. Mode and tanh seeds vary along the first axis.
struct CatalogSeeds {
    std::vector<double> constants{-1.5, -0.9, -0.3, 0.0, 0.3, 0.9, 1.5};
    int modes = 3;                // cos(k pi x / L) perturbations of 0, k = 1..modes
    double mode_amplitude = 0.5;
    std::vector<double> tanh_widths{0.05, 0.1, 0.2};  // relative to the extent
    double dedupe_tol = 1e-6;     // L² distance below which two solutions coincide
};

/// Newton from every seed; seeds that fail to converge are skipped.
/// Duplicates are removed, first found wins. No completeness claim.
std::vector<Equilibrium> build_catalog(const Discretization& disc, const Potential& potential,
                                       const CatalogSeeds& seeds = {},
                                       const EquilibriumOptions& options = {});

/// The state (theta ≡ 1, chi*) of an equilibrium.
State equilibrium_state(std::shared_ptr<const Discretization> disc, const Equilibrium& eq,
                        double time = 0.0);

struct EquilibriumDistance {
    double distance = 0.0;
    std::string label;
    std::size_t index = 0;
};

/// min over the catalog of d_X(state, (1, chi*)); ties go to the first index.
/// Throws DomainError on an empty catalog.
EquilibriumDistance equilibrium_distance(const State& state,
                                         const std::vector<Equilibrium>& catalog,
                                         const Potential& potential,
                                         const MetricParams& params = {});

}  // namespace pfdyn
