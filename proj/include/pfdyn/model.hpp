#pragma once

#include "pfdyn/potential.hpp"
#include "pfdyn/state.hpp"

namespace pfdyn {

/// Energy E(theta, chi) = ∫ (theta - log theta + |chi|²/2 + |∇chi|²/2 + W_eff(chi))
/// with W_eff(r) = W(r) - r²/2 the potential of the B-form of the phase equation.
/// The quadratic and potential parts therefore add up to ∫ W(chi).
struct EnergyReport {
    double total = 0.0;
    double entropy = 0.0;    // ∫ (theta - log theta)
    double quadratic = 0.0;  // ½ ||chi||²
    double gradient = 0.0;   // ½ ⟨-Laplacian_N chi, chi⟩
    double potential = 0.0;  // ∫ (W(chi) - chi²/2)
};

/// Parameters of the phase-space metric: p > 3 and epsilon in (0, 1).
struct MetricParams {
    double p = 4.0;
    double epsilon = 0.5;

    /// Throws DomainError unless p > 3 and 0 < epsilon < 1.
    void validate() const;
};

EnergyReport energy(const State& state, const Potential& potential);

/// ||1 - 1/theta||²_{V0} + ||chi_rate||².
double dissipation(const State& state, const Field& chi_rate);

/// d_X(s1, s2) = ||theta1 - theta2||_{L^p} + ||B^{(3+eps)/4} (chi1 - chi2)||
///             + ||log⁻theta1 - log⁻theta2||_{L^1} + ||beta(chi1) - beta(chi2)||_{L^1},
/// with log⁻ t = max(0, -log t).
double metric_dx(const State& s1, const State& s2, const Potential& potential,
                 const MetricParams& params = {});

/// Nodewise theta + chi on all nodes (theta = 1 on the boundary).
Field enthalpy(const State& state);

}  // namespace pfdyn
