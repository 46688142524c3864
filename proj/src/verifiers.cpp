#include "pfdyn/verifiers.hpp"

#include "pfdyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pfdyn {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::pass;
    if (s == "fail") return Verdict::fail;
    if (s == "inconclusive") return Verdict::inconclusive;
    throw DomainError("unknown verdict '" + s + "'");
}

LyapunovReport check_lyapunov(const TrajectoryRecord& record, double rel_tol,
                              double newton_tol, double lambda) {
    LyapunovReport rep;
    rep.energy_initial = record.initial.energy.total;
    rep.energy_final = record.rows.empty() ? rep.energy_initial : record.rows.back().energy.total;
    rep.total_decay = rep.energy_initial - rep.energy_final;
    rep.max_uptick = -kInf;
    double prev = rep.energy_initial;
    for (const auto& row : record.rows) {
        const double up = row.energy.total - prev;
        rep.max_uptick = std::max(rep.max_uptick, up);
        if (!(up <= rel_tol * (1.0 + std::abs(prev)))) {
            rep.violations.push_back(row.step);
            if (rep.first_violation < 0) rep.first_violation = row.step;
        }
        prev = row.energy.total;
    }
    if (record.rows.empty()) rep.max_uptick = 0.0;
    rep.dissipation_integral =
        record.rows.empty() ? 0.0 : record.rows.back().dissipation_integral -
                                        record.initial.dissipation_integral;
    rep.balance_defect = rep.energy_final - rep.energy_initial + rep.dissipation_integral;
    double guaranteed = 0.0;
    for (const auto& row : record.rows) {
        const double keep = std::max(0.0, 1.0 - 0.5 * lambda * row.dt);
        guaranteed += row.dt * (row.flux_v0 * row.flux_v0 + keep * row.chi_rate * row.chi_rate);
    }
    rep.guaranteed_dissipation = guaranteed;
    rep.dissipation_bounded = guaranteed <= rep.total_decay + 100.0 * newton_tol;
    rep.verdict = (rep.violations.empty() && rep.dissipation_bounded) ? Verdict::pass
                                                                       : Verdict::fail;
    return rep;
}

std::vector<double> RegularizationReport::q_star() const {
    std::vector<double> out;
    for (const auto& q : quantities) out.push_back(q.tail_sup);
    return out;
}

RegularizationReport regularization_report(const TrajectoryRecord& record,
                                           const RegularizationOptions& options) {
    using Getter = double (*)(const DiagnosticsRow&);
    struct Quantity {
        const char* name;
        Getter get;
    };
    static const Quantity quantities[] = {
        {"max_theta", [](const DiagnosticsRow& r) { return r.theta_max; }},
        {"max_inv_theta", [](const DiagnosticsRow& r) { return r.inv_theta_linf; }},
        {"theta_v", [](const DiagnosticsRow& r) { return r.theta_v; }},
        {"inv_theta_v", [](const DiagnosticsRow& r) { return r.inv_theta_v; }},
        {"chi_h2", [](const DiagnosticsRow& r) { return r.chi_h2; }},
    };

    RegularizationReport rep;
    const auto rows = record.all_rows();
    const double t0 = rows.front().t;
    const double t1 = rows.back().t;
    rep.tail_start = t0 + (1.0 - options.tail_fraction) * (t1 - t0);

    std::size_t tail_rows = 0;
    for (const auto& r : rows) tail_rows += r.t >= rep.tail_start ? 1 : 0;

    bool finite = true;
    for (const auto& q : quantities) {
        QuantityEnvelope env;
        env.name = q.name;
        env.initial = q.get(rows.front());
        env.global_sup = -kInf;
        env.tail_sup = -kInf;
        for (const auto& r : rows) {
            const double v = q.get(r);
            if (!std::isfinite(v)) finite = false;
            env.global_sup = std::max(env.global_sup, v);
            if (r.t >= rep.tail_start) env.tail_sup = std::max(env.tail_sup, v);
        }
        env.onset = t0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (q.get(rows[i]) > options.factor * env.tail_sup) {
                env.onset = i + 1 < rows.size() ? rows[i + 1].t : rows[i].t;
            }
        }
        rep.t_star = std::max(rep.t_star, env.onset);
        rep.quantities.push_back(env);
    }
    rep.t_star = std::max(rep.t_star, t0);

    if (!finite) {
        rep.verdict = Verdict::fail;
        rep.note = "non-finite monitored quantity";
    } else if (tail_rows < options.min_tail_rows) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "record too short for the tail window";
    } else if (rep.t_star > rep.tail_start) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "transient extends into the tail window";
    } else {
        rep.verdict = Verdict::pass;
    }
    if (record.failure) rep.note += rep.note.empty() ? "run failed" : "; run failed";
    return rep;
}

namespace {

void require_matching_snapshots(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    if (a.snapshots.size() != b.snapshots.size()) {
        throw DimensionError("records have different snapshot counts");
    }
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        const auto& sa = a.snapshots[i];
        const auto& sb = b.snapshots[i];
        if (sa.step != sb.step || std::abs(sa.state.time - sb.state.time) > 1e-12) {
            throw DimensionError("records have different snapshot times");
        }
        require_same_grid(sa.state, sb.state, "record comparison");
    }
}

}  // namespace

ContractionReport contraction_check(const TrajectoryRecord& r1, const TrajectoryRecord& r2,
                                    const Potential& potential, double tol) {
    require_matching_snapshots(r1, r2);
    ContractionReport rep;
    rep.lambda = potential.lambda();
    rep.tol = tol;
    rep.min_c5 = kNaN;
    if (r1.snapshots.empty()) return rep;

    const Discretization& d = *r1.snapshots.front().state.disc;
    const Grid& g = d.grid();
    const Field& w_int = g.restrict_to_interior(g.weights());
    const double t0 = r1.snapshots.front().state.time;
    double n0 = 0.0;
    double prev_n = 0.0;
    for (std::size_t k = 0; k < r1.snapshots.size(); ++k) {
        const State& s1 = r1.snapshots[k].state;
        const State& s2 = r2.snapshots[k].state;
        const Field dtheta = s1.theta - s2.theta;
        const Field dchi = s1.chi - s2.chi;
        const Field e = dtheta + g.restrict_to_interior(dchi);

        ContractionRow row;
        PairDistance& pd = row.distance;
        pd.t = s1.time;
        const double dual = d.norm_dual_v0(e);
        pd.n_dual = dual * dual;
        pd.n_chi = d.inner(dchi, dchi);
        pd.n_theta = d.inner(dtheta, dtheta);
        const double nv = d.norm_v(dchi);
        pd.n_chi_v = nv * nv;
        const double n = pd.n_dual + pd.n_chi;
        if (k == 0) n0 = n;

        const double growth = std::exp(2.0 * rep.lambda * (pd.t - t0));
        row.bound = n0 * growth * (1.0 + tol);
        row.gronwall_ok = n <= row.bound;
        if (n0 > 0.0) rep.max_gronwall_ratio = std::max(rep.max_gronwall_ratio, n / (n0 * growth));

        const double mono =
            2.0 * (w_int.array() * (s2.theta.cwiseInverse() - s1.theta.cwiseInverse()).array() *
                   dtheta.array())
                      .sum();
        const double max1 = std::max(1.0, s1.theta.maxCoeff());
        const double max2 = std::max(1.0, s2.theta.maxCoeff());
        row.c5_lower = 1.0 / (max1 * max2);
        if (pd.n_theta > 0.0) {
            row.c5 = mono / pd.n_theta;
            row.c5_ok = row.c5 >= row.c5_lower;
            rep.min_c5 = std::isnan(rep.min_c5) ? row.c5 : std::min(rep.min_c5, row.c5);
        } else {
            row.c5 = kNaN;
        }

        row.balance = kNaN;
        if (k > 0 && r1.snapshots[k].step == r1.snapshots[k - 1].step + 1) {
            const double dt = pd.t - r1.snapshots[k - 1].state.time;
            const double grad = d.inner(d.apply_neumann_laplacian(dchi), dchi);
            row.balance = n - prev_n + dt * (mono + 2.0 * grad) - 2.0 * rep.lambda * dt * pd.n_chi;
            const double slack = tol * prev_n + 1e-8 * dt * std::sqrt(n) + 1e-15;
            rep.max_balance_excess = k == 1 ? row.balance - slack
                                            : std::max(rep.max_balance_excess, row.balance - slack);
            if (row.balance > slack) rep.balance_ok = false;
        }
        prev_n = n;
        if (!row.gronwall_ok || !row.c5_ok) rep.verdict = Verdict::fail;
        rep.rows.push_back(row);
    }
    return rep;
}

namespace {

struct WindowNorms {
    double full = 0.0;
    double projected = 0.0;
};

WindowNorms window_norms(const TrajectoryRecord& a, const TrajectoryRecord& b, std::size_t first,
                         std::size_t count, double weight, int modes) {
    WindowNorms out;
    for (std::size_t i = first; i < first + count; ++i) {
        const State& s1 = a.snapshots[i].state;
        const State& s2 = b.snapshots[i].state;
        const Discretization& d = *s1.disc;
        const Field dtheta = s1.theta - s2.theta;
        const Field dchi = s1.chi - s2.chi;
        const double v = d.norm_v(dchi);
        out.full += weight * (d.inner(dtheta, dtheta) + v * v);
        const Field pt = d.project_low_modes(dtheta, modes, Space::V0);
        const Field pc = d.project_low_modes(dchi, modes, Space::V);
        const double pv = d.norm_v(pc);
        out.projected += weight * (d.inner(pt, pt) + pv * pv);
    }
    return out;
}

double uniform_spacing(const TrajectoryRecord& r) {
    const auto& s = r.snapshots;
    if (s.size() < 2) throw DomainError("record has fewer than two snapshots");
    const double h = s[1].state.time - s[0].state.time;
    for (std::size_t i = 2; i < s.size(); ++i) {
        const double hi = s[i].state.time - s[i - 1].state.time;
        if (std::abs(hi - h) > 1e-9 * std::max(1.0, h)) {
            throw DomainError("snapshots are not equally spaced in time");
        }
    }
    return h;
}

}  // namespace

SqueezingReport squeezing_probe(
    const std::vector<std::pair<const TrajectoryRecord*, const TrajectoryRecord*>>& pairs,
    double ell, int modes, double gamma, double t0) {
    if (!(ell > 0.0)) throw DomainError("squeezing_probe: ell must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("squeezing_probe: gamma must lie in (0, 1)");
    SqueezingReport rep;
    rep.ell = ell;
    rep.modes = modes;
    rep.gamma = gamma;
    for (const auto& [a, b] : pairs) {
        require_matching_snapshots(*a, *b);
        const double h = uniform_spacing(*a);
        const auto m = static_cast<std::size_t>(std::llround(ell / h));
        if (m == 0 || std::abs(static_cast<double>(m) * h - ell) > 1e-9 * ell) {
            throw DomainError("squeezing_probe: ell is not a multiple of the snapshot spacing");
        }
        std::size_t i0 = 0;
        while (i0 < a->snapshots.size() && a->snapshots[i0].state.time < t0 - 1e-12) ++i0;
        if (i0 + 2 * m > a->snapshots.size()) {
            throw DomainError("squeezing_probe: record shorter than 2 ell after t0");
        }
        const WindowNorms w = window_norms(*a, *b, i0, m, h, modes);
        const WindowNorms lw = window_norms(*a, *b, i0 + m, m, h, modes);
        SqueezingPair p;
        p.shifted = lw.full;
        p.original = w.full;
        p.projected = w.projected + lw.projected;
        const double excess = p.shifted - gamma * p.original;
        if (excess <= 0.0) {
            p.c = 0.0;
        } else {
            p.c = p.projected > 0.0 ? excess / p.projected : kInf;
        }
        rep.c = std::max(rep.c, p.c);
        rep.pairs.push_back(p);
    }
    rep.certified = std::isfinite(rep.c);
    return rep;
}

HolderReport holder_in_time_check(const TrajectoryRecord& record, double t_start,
                                  double min_exponent, double floor, double max_gap_fraction) {
    HolderReport rep;
    std::vector<const Snapshot*> snaps;
    for (const auto& s : record.snapshots) {
        if (s.state.time >= t_start - 1e-12) snaps.push_back(&s);
    }
    if (snaps.size() < 3) {
        rep.note = "fewer than three snapshots in the window";
        return rep;
    }
    const double h = snaps[1]->state.time - snaps[0]->state.time;
    for (std::size_t i = 2; i < snaps.size(); ++i) {
        const double hi = snaps[i]->state.time - snaps[i - 1]->state.time;
        if (std::abs(hi - h) > 1e-9 * std::max(1.0, h)) {
            throw DomainError("holder_in_time_check: snapshots are not equally spaced");
        }
    }

    const Discretization& d = *snaps.front()->state.disc;
    auto dist2 = [&](const State& a, const State& b) {
        const Field dt = a.theta - b.theta;
        const double v = d.norm_v(a.chi - b.chi);
        return d.inner(dt, dt) + v * v;
    };

    const std::size_t count = snaps.size();
    bool all_below_floor = true;
    std::vector<std::vector<double>> dist;  // dist[j][s]: |w(s + 2^j h) - w(s)|
    const double window = snaps.back()->state.time - snaps.front()->state.time;
    for (std::size_t g = 1; 2 * g <= count - 1 && g * h <= max_gap_fraction * window * (1 + 1e-12);
         g *= 2) {
        HolderGap gap;
        gap.gap = static_cast<double>(g) * h;
        double sum = 0.0;
        std::vector<double> row;
        for (std::size_t s = 0; s + g < count; ++s) {
            const double d2 = dist2(snaps[s + g]->state, snaps[s]->state);
            const double span = snaps[s + g]->state.time - snaps[s]->state.time;
            row.push_back(std::sqrt(d2));
            sum += row.back();
            gap.max_ratio = std::max(gap.max_ratio, d2 / span);
            ++gap.samples;
            if (row.back() > floor) all_below_floor = false;
        }
        gap.mean_distance = sum / gap.samples;
        rep.c = std::max(rep.c, gap.max_ratio);
        rep.gaps.push_back(gap);
        dist.push_back(std::move(row));
    }

    if (dist.empty()) {
        rep.note = "no gap fits the window";
        return rep;
    }
    if (all_below_floor) {
        rep.verdict = Verdict::pass;
        rep.note = "stationary record";
        return rep;
    }
    double step = 0.0;
    for (const auto& row : record.rows) {
        if (row.t > snaps.front()->state.time + 1e-12) step = std::max(step, row.dt);
    }
    if (step > 0.0 && h > 1.5 * step) {
        rep.note = "snapshot spacing exceeds the time step; local slopes are not resolved";
        return rep;
    }
    // Median of local log-log slopes between consecutive dyadic gaps at a common
    // start point; robust against a single unresolved transient.
    std::vector<double> slopes;
    for (std::size_t j = 0; j + 1 < dist.size(); ++j) {
        for (std::size_t s = 0; s < dist[j + 1].size(); ++s) {
            const double a = dist[j][s];
            const double b = dist[j + 1][s];
            if (a > floor && b > floor) slopes.push_back(std::log(b / a) / std::log(2.0));
        }
    }
    if (slopes.empty()) {
        rep.note = "fewer than two resolvable gaps";
        return rep;
    }
    std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
    rep.exponent = slopes[slopes.size() / 2];
    rep.verdict = rep.exponent >= min_exponent ? Verdict::pass : Verdict::fail;
    return rep;
}

}  // namespace pfdyn
