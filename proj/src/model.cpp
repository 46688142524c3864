#include "pfdyn/model.hpp"

#include "pfdyn/errors.hpp"

#include <cmath>
#include <string>

namespace pfdyn {

void MetricParams::validate() const {
    if (!(p > 3.0)) {
        throw DomainError("metric exponent must satisfy p > 3, got " + std::to_string(p));
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw DomainError("metric epsilon must lie in (0, 1), got " + std::to_string(epsilon));
    }
}

EnergyReport energy(const State& state, const Potential& potential) {
    state.validate();
    const Discretization& d = *state.disc;
    const Field& w = d.grid().weights();
    const Field theta = state.theta_full();

    EnergyReport r;
    r.entropy = (w.array() * (theta.array() - theta.array().log())).sum();
    r.quadratic = 0.5 * (w.array() * state.chi.array().square()).sum();
    r.gradient = 0.5 * d.inner(d.apply_neumann_laplacian(state.chi), state.chi);
    double pot = 0.0;
    for (Eigen::Index i = 0; i < state.chi.size(); ++i) {
        const double c = state.chi[i];
        pot += w[i] * (potential.value(c) - 0.5 * c * c);
    }
    r.potential = pot;
    r.total = r.entropy + r.quadratic + r.gradient + r.potential;
    return r;
}

double dissipation(const State& state, const Field& chi_rate) {
    const Discretization& d = *state.disc;
    const double flux = d.norm_v0(state.flux_potential());
    const double rate = d.norm_l2(chi_rate);
    return flux * flux + rate * rate;
}

double metric_dx(const State& s1, const State& s2, const Potential& potential,
                 const MetricParams& params) {
    params.validate();
    require_same_grid(s1, s2, "metric_dX");
    s1.validate();
    s2.validate();
    const Discretization& d = *s1.disc;

    const double temperature = d.norm_lp(s1.theta - s2.theta, params.p);
    const double order = d.norm_fractional(s1.chi - s2.chi, (3.0 + params.epsilon) / 4.0);

    auto log_minus = [](double t) { return std::max(0.0, -std::log(t)); };
    const Field lm = s1.theta.unaryExpr(log_minus) - s2.theta.unaryExpr(log_minus);
    const double entropy = d.norm_lp(lm, 1.0);

    const double monotone = d.norm_lp(potential.beta(s1.chi) - potential.beta(s2.chi), 1.0);
    return temperature + order + entropy + monotone;
}

Field enthalpy(const State& state) { return state.theta_full() + state.chi; }

}  // namespace pfdyn
