#include "pfdyn/diagnostics.hpp"

namespace pfdyn {

namespace {

void fill_state_norms(DiagnosticsRow& row, const State& s, const Potential& potential,
                      double lp_exponent) {
    const Discretization& d = *s.disc;
    const Field theta = s.theta_full();
    const Field inv_theta = theta.cwiseInverse();
    row.t = s.time;
    row.energy = energy(s, potential);
    row.theta_min = theta.minCoeff();
    row.theta_max = theta.maxCoeff();
    row.theta_lp = d.norm_lp(theta, lp_exponent);
    row.theta_v = d.norm_v(theta);
    row.inv_theta_v = d.norm_v(inv_theta);
    row.inv_theta_linf = inv_theta.maxCoeff();
    row.chi_h2 = d.norm_l2(d.apply_b(s.chi));
    row.flux_v0 = d.norm_v0(s.flux_potential());
}

}  // namespace

DiagnosticsRow initial_row(const State& state, const Potential& potential, double lp_exponent) {
    DiagnosticsRow row;
    fill_state_norms(row, state, potential, lp_exponent);
    row.dissipation = row.flux_v0 * row.flux_v0;
    row.stats.min_theta_seen = row.theta_min;
    return row;
}

DiagnosticsRow step_row(const State& prev, const State& next, const StepStats& stats,
                        const Potential& potential, double lp_exponent, long step,
                        double integral_before) {
    DiagnosticsRow row;
    fill_state_norms(row, next, potential, lp_exponent);
    row.step = step;
    row.dt = stats.dt_used;
    const Field chi_rate = (next.chi - prev.chi) / stats.dt_used;
    row.chi_rate = next.disc->norm_l2(chi_rate);
    row.dissipation = row.flux_v0 * row.flux_v0 + row.chi_rate * row.chi_rate;
    row.dissipation_integral = integral_before + stats.dt_used * row.dissipation;
    row.stats = stats;
    return row;
}

}  // namespace pfdyn
