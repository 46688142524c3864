#include "pfdyn/attraction.hpp"

#include "pfdyn/detail/fit.hpp"
#include "pfdyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pfdyn {

double product_distance(const State& a, const State& b) {
    require_same_grid(a, b, "product_distance");
    const Discretization& d = *a.disc;
    const double t = d.norm_dual_v0(a.theta - b.theta);
    const double c = d.norm_l2(a.chi - b.chi);
    return std::sqrt(t * t + c * c);
}

AttractionReport attraction_fit(const std::vector<TrajectoryRecord>& records,
                                const std::vector<Equilibrium>& catalog,
                                const AttractionOptions& options, double min_r_squared) {
    if (records.empty()) throw DomainError("attraction_fit: no trajectories");
    const auto& ref = records.front().snapshots;
    for (const auto& r : records) {
        if (r.snapshots.size() != ref.size()) {
            throw DimensionError("attraction_fit: records have different snapshot counts");
        }
        for (std::size_t k = 0; k < ref.size(); ++k) {
            if (r.snapshots[k].step != ref[k].step) {
                throw DimensionError("attraction_fit: records have different snapshot steps");
            }
        }
    }
    if (ref.size() < 2) throw DomainError("attraction_fit: fewer than two snapshots");

    const auto& disc = ref.front().state.disc;
    std::vector<State> equilibria;
    for (const auto& eq : catalog) equilibria.push_back(equilibrium_state(disc, eq));

    AttractionReport rep;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        double worst = 0.0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const State& s = records[i].snapshots[k].state;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : equilibria) best = std::min(best, product_distance(s, e));
            for (std::size_t j = 0; j < records.size(); ++j) {
                if (j == i) continue;
                best = std::min(best, product_distance(s, records[j].snapshots.back().state));
            }
            worst = std::max(worst, best);
        }
        rep.times.push_back(ref[k].state.time);
        rep.distances.push_back(worst);
    }

    const double t0 = rep.times.front();
    const double t1 = rep.times.back();
    const double tail_start = t0 + (1.0 - options.tail_fraction) * (t1 - t0);
    std::vector<double> x, y;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        if (rep.times[k] < tail_start || !(rep.distances[k] > options.floor)) continue;
        if (rep.distances[k] > prev * (1.0 + 1e-9)) rep.monotone = false;
        prev = rep.distances[k];
        x.push_back(rep.times[k]);
        y.push_back(std::log(rep.distances[k]));
    }
    rep.fit_points = x.size();
    if (x.size() < options.min_points) {
        rep.floor_censored = true;
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    const detail::LineFit fit = detail::fit_line(x, y);
    rep.kappa = -fit.slope;
    rep.log_prefactor = fit.intercept;
    rep.r_squared = fit.r_squared;
    rep.verdict = (rep.kappa > 0.0 && rep.r_squared >= min_r_squared && rep.monotone)
                      ? Verdict::pass
                      : Verdict::fail;
    return rep;
}

}  // namespace pfdyn
