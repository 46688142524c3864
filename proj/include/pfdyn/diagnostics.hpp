#pragma once

#include "pfdyn/model.hpp"

namespace pfdyn {

/// Newton/step bookkeeping of one accepted time step.
struct StepStats {
    int newton_iterations = 0;
    double final_residual = 0.0;
    int damping_events = 0;
    double dt_used = 0.0;
    double min_theta_seen = 0.0;
    int dt_halvings = 0;
};

/// One row of the diagnostics stream. Row 0 describes the initial state
/// (zero rates, no step stats); row k describes the state after step k.
struct DiagnosticsRow {
    long step = 0;
    double t = 0.0;
    double dt = 0.0;
    EnergyReport energy;
    double dissipation = 0.0;           // ||1-1/theta||²_V0 + ||chi_t||²
    double dissipation_integral = 0.0;  // sum of dt * dissipation up to this row
    double theta_min = 0.0;
    double theta_max = 0.0;
    double theta_lp = 0.0;        // ||theta||_{L^p}
    double theta_v = 0.0;         // ||theta||_V
    double inv_theta_v = 0.0;     // ||1/theta||_V
    double inv_theta_linf = 0.0;  // ||1/theta||_{L^inf}
    double chi_h2 = 0.0;          // ||B chi||, the H² proxy
    double chi_rate = 0.0;        // ||(chi - chi_prev) / dt||
    double flux_v0 = 0.0;         // ||1 - 1/theta||_V0
    StepStats stats;
};

/// Row 0 for a trajectory starting at `state`.
DiagnosticsRow initial_row(const State& state, const Potential& potential, double lp_exponent);

/// Row for the step prev -> next. `integral_before` is the dissipation
/// integral up to prev.
DiagnosticsRow step_row(const State& prev, const State& next, const StepStats& stats,
                        const Potential& potential, double lp_exponent, long step,
                        double integral_before);

}  // namespace pfdyn
