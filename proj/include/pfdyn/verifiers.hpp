#pragma once

#include "pfdyn/trajectory.hpp"

#include <string>
#include <vector>

namespace pfdyn {

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v) noexcept;
/// Throws DomainError on unknown names.
Verdict verdict_from_string(const std::string& s);

// ---------------------------------------------------------------- Lyapunov

struct LyapunovReport {
    Verdict verdict = Verdict::pass;
    double energy_initial = 0.0;
    double energy_final = 0.0;
    double total_decay = 0.0;    // E(0) - E(end)
    double max_uptick = 0.0;     // largest E(k) - E(k-1), may be negative
    long first_violation = -1;   // step index of the first uptick beyond tolerance
    std::vector<long> violations;
    double dissipation_integral = 0.0;
    /// E(end) - E(0) + sum dt D. Implicit Euler dissipates extra energy numerically,
    /// so this is usually negative and of order dt; it carries no guaranteed sign.
    double balance_defect = 0.0;
    /// sum dt (|1 - 1/theta|²_V0 + (1 - lambda dt / 2) |chi_t|²), the part of the
    /// dissipation the discrete energy law guarantees.
    double guaranteed_dissipation = 0.0;
    /// guaranteed_dissipation <= E(0) - E(end) + 100 newton_tol.
    bool dissipation_bounded = true;
};

/// Energy must not increase by more than rel_tol * (1 + E) per step. `lambda` is the
/// semiconvexity constant of the potential.
LyapunovReport check_lyapunov(const TrajectoryRecord& record, double rel_tol = 1e-8,
                              double newton_tol = 1e-10, double lambda = 4.0);

// ---------------------------------------------------------- regularization

struct QuantityEnvelope {
    std::string name;
    double initial = 0.0;
    double global_sup = 0.0;
    double tail_sup = 0.0;
    double onset = 0.0;  // first time after which the quantity stays below factor * tail_sup
};

struct RegularizationOptions {
    /// The tail is the last `tail_fraction` of the time span.
    double tail_fraction = 0.5;
    double factor = 1.05;
    std::size_t min_tail_rows = 10;
};

struct RegularizationReport {
    Verdict verdict = Verdict::inconclusive;
    double t_star = 0.0;
    double tail_start = 0.0;
    std::vector<QuantityEnvelope> quantities;  // max theta, max 1/theta, |theta|_V, |1/theta|_V, |B chi|
    std::string note;

    /// Tail suprema in the order of `quantities`.
    std::vector<double> q_star() const;
};

RegularizationReport regularization_report(const TrajectoryRecord& record,
                                           const RegularizationOptions& options = {});

// ------------------------------------------------------------- contraction

struct PairDistance {
    double t = 0.0;
    double n_dual = 0.0;   // |e1 - e2|²_{H^-1}, e = theta + chi on interior nodes
    double n_chi = 0.0;    // |chi1 - chi2|²
    double n_theta = 0.0;  // |theta1 - theta2|²
    double n_chi_v = 0.0;  // |chi1 - chi2|²_V
};

struct ContractionRow {
    PairDistance distance;
    double bound = 0.0;     // N(t0) exp(2 lambda (t - t0)) (1 + tol)
    double c5 = 0.0;        // 2 ∫ (1/theta2 - 1/theta1)(theta1 - theta2) / |theta1 - theta2|²; NaN if equal
    double c5_lower = 0.0;  // 1 / (max theta1 max theta2)
    /// N(t_k) - N(t_{k-1}) + dt (2 ∫ (1/theta2 - 1/theta1)(theta1 - theta2) + 2 |∇(chi1 - chi2)|²)
    /// - 2 lambda dt |chi1 - chi2|² at consecutive steps; NaN where the gap is not one step.
    double balance = 0.0;
    bool gronwall_ok = true;
    bool c5_ok = true;
};

struct ContractionReport {
    Verdict verdict = Verdict::pass;
    double lambda = 0.0;
    double tol = 0.0;
    std::vector<ContractionRow> rows;
    double min_c5 = 0.0;               // NaN when every row has equal temperatures
    double max_gronwall_ratio = 0.0;   // max N(t) / (N(t0) exp(2 lambda (t - t0)))
    double max_balance_excess = 0.0;   // max of balance - slack over consecutive rows
    bool balance_ok = true;

    double n_total(std::size_t i) const {
        return rows[i].distance.n_dual + rows[i].distance.n_chi;
    }
};

/// Both records must carry snapshots at the same steps and times.
ContractionReport contraction_check(const TrajectoryRecord& r1, const TrajectoryRecord& r2,
                                    const Potential& potential, double tol = 1e-6);

// --------------------------------------------------------------- squeezing

struct SqueezingPair {
    double shifted = 0.0;    // |L w|²_{L²(0,ell;H×V)}
    double original = 0.0;   // |w|²
    double projected = 0.0;  // |P w|² + |P L w|²
    double c = 0.0;          // smallest constant certifying the inequality (inf if none)
};

struct SqueezingReport {
    double ell = 0.0;
    int modes = 0;
    double gamma = 0.125;
    std::vector<SqueezingPair> pairs;
    double c = 0.0;  // max over pairs
    bool certified = true;
};

/// For each pair w = (theta1 - theta2, chi1 - chi2) on [t0, t0 + 2 ell], evaluates
/// |L w|² <= gamma |w|² + c (|P w|² + |P L w|²), where L is the shift by ell and P
/// projects onto the `modes` lowest eigenmodes (A for theta, B for chi).
/// Snapshots must be equally spaced. Throws DomainError when a record is too short.
SqueezingReport squeezing_probe(
    const std::vector<std::pair<const TrajectoryRecord*, const TrajectoryRecord*>>& pairs,
    double ell, int modes, double gamma = 0.125, double t0 = 0.0);

// ------------------------------------------------------------------ Hölder

struct HolderGap {
    double gap = 0.0;
    double mean_distance = 0.0;  // mean |w(t) - w(s)|_{H×V}
    double max_ratio = 0.0;      // max |w(t) - w(s)|² / |t - s|
    int samples = 0;
};

struct HolderReport {
    Verdict verdict = Verdict::inconclusive;
    double c = 0.0;         // smallest C with |w(t) - w(s)|² <= C |t - s|
    double exponent = 0.0;  // median local log-log slope of distance against gap
    std::vector<HolderGap> gaps;
    std::string note;
};

/// Uses snapshots at or after t_start with dyadic gaps from the snapshot spacing up to
/// max_gap_fraction of the window. The exponent is the median over start points of
/// the log-log slope between consecutive gaps; passes when it is at least
/// min_exponent, or when every distance is below `floor`. Inconclusive when fewer
/// than two gaps fit or when snapshots are spaced wider than one time step.
HolderReport holder_in_time_check(const TrajectoryRecord& record, double t_start = 0.0,
                                  double min_exponent = 0.4, double floor = 1e-12,
                                  double max_gap_fraction = 0.125);

}  // namespace pfdyn
