#include "helpers.hpp"

#include "pfdyn/attraction.hpp"
#include "pfdyn/bundle.hpp"
#include "pfdyn/errors.hpp"
#include "pfdyn/recipes.hpp"
#include "pfdyn/verifiers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pfdyn;

namespace {

const Potential kWell = Potential::double_well();

TrajectoryRecord trajectory(const State& s0, double t_end, long snapshot_every = 1,
                            StepConfig cfg = {}) {
    Stepper s(s0.disc, kWell, cfg);
    TrajectoryOptions o;
    o.t_end = t_end;
    o.snapshot_every = snapshot_every;
    return run_trajectory(s, s0, o);
}

State random_smooth(const std::shared_ptr<const Discretization>& d, std::uint64_t seed,
                    double theta_min = 0.5, double theta_max = 2.0) {
    InitialRecipe r;
    r.kind = "random_smooth";
    r.theta_min = theta_min;
    r.theta_max = theta_max;
    r.chi = 0.4;
    r.chi_amplitude = 0.6;
    return make_initial_state(d, r, seed);
}

bool rows_equal(const DiagnosticsRow& a, const DiagnosticsRow& b) {
    return a.step == b.step && a.t == b.t && a.energy.total == b.energy.total &&
           a.dissipation == b.dissipation && a.theta_max == b.theta_max && a.chi_h2 == b.chi_h2;
}

}  // namespace

TEST_CASE("trajectory record layout") {
    auto d = make_discretization(1, 1.0, 16);
    TrajectoryRecord r = trajectory(random_smooth(d, 1), 1.0, 4);
    CHECK(r.rows.size() == 16);
    CHECK(r.end_time() == doctest::Approx(1.0));
    CHECK(r.all_rows().size() == 17);
    REQUIRE(r.snapshots.size() == 5);
    CHECK(r.snapshots.front().step == 0);
    CHECK(r.snapshots.back().step == 16);
    CHECK_FALSE(r.failure.has_value());

    TrajectoryRecord ends_only = trajectory(random_smooth(d, 1), 1.0, 0);
    CHECK(ends_only.snapshots.size() == 2);
}

TEST_CASE("trajectory keeps partial data on step failure") {
    auto d = make_discretization(1, 1.0, 32);
    StepConfig c;
    c.newton_max_iters = 1;
    c.newton_tol = 1e-14;
    c.max_dt_halvings = 0;
    TrajectoryRecord r = trajectory(random_smooth(d, 2, 0.2, 5.0), 1.0, 1, c);
    REQUIRE(r.failure.has_value());
    CHECK(r.failure->step == static_cast<long>(r.rows.size()) + 1);
    CHECK(r.failure->last_residual > 0.0);
    CHECK_FALSE(r.failure->message.empty());
}

TEST_CASE("Lyapunov check passes on fixed points and decaying runs") {
    auto d = make_discretization(1, 1.0, 32);
    TrajectoryRecord fixed = trajectory(constant_state(d, 1.0, 1.0), 2.0);
    LyapunovReport lf = check_lyapunov(fixed);
    CHECK(lf.verdict == Verdict::pass);
    CHECK(lf.total_decay == doctest::Approx(0.0).scale(1e-12));
    CHECK(lf.dissipation_integral < 1e-20);

    TrajectoryRecord moving = trajectory(random_smooth(d, 3), 2.0);
    LyapunovReport lm = check_lyapunov(moving);
    CHECK(lm.verdict == Verdict::pass);
    CHECK(lm.total_decay > 0.0);
    CHECK(lm.dissipation_bounded);
    CHECK(lm.guaranteed_dissipation <= lm.total_decay + 1e-8);
    CHECK(lm.guaranteed_dissipation <= lm.dissipation_integral);
    CHECK(lm.energy_final <= lm.energy_initial);
}

TEST_CASE("Lyapunov check catches an injected energy increase") {
    auto d = make_discretization(1, 1.0, 32);
    TrajectoryRecord r = trajectory(random_smooth(d, 4), 1.0);
    r.rows[6].energy.total = r.rows[5].energy.total + 1e-3;
    LyapunovReport l = check_lyapunov(r);
    CHECK(l.verdict == Verdict::fail);
    CHECK(l.first_violation == r.rows[6].step);
    CHECK(l.max_uptick > 0.0);
}

TEST_CASE("Lyapunov check catches dissipation beyond the energy decay") {
    auto d = make_discretization(1, 1.0, 32);
    TrajectoryRecord r = trajectory(random_smooth(d, 4), 1.0);
    CHECK(check_lyapunov(r).verdict == Verdict::pass);
    r.rows[3].flux_v0 *= 1e3;
    LyapunovReport l = check_lyapunov(r);
    CHECK_FALSE(l.dissipation_bounded);
    CHECK(l.verdict == Verdict::fail);
}

TEST_CASE("regularization report on extreme initial temperatures") {
    auto d = make_discretization(1, 1.0, 32);
    TrajectoryRecord r = trajectory(random_smooth(d, 5, 1e-2, 1e2), 8.0);
    REQUIRE_FALSE(r.failure.has_value());
    RegularizationReport rep = regularization_report(r);
    CHECK(rep.verdict == Verdict::pass);
    REQUIRE(rep.quantities.size() == 5);
    CHECK(rep.quantities[0].initial > 50.0);
    CHECK(rep.quantities[1].initial > 50.0);
    CHECK(rep.quantities[0].tail_sup < 2.0);
    CHECK(rep.quantities[1].tail_sup < 2.0);
    CHECK(std::isfinite(rep.t_star));
    CHECK(rep.t_star <= rep.tail_start);
    for (const auto& q : rep.quantities) CHECK(q.tail_sup <= q.global_sup);
    CHECK(rep.q_star().size() == 5);
}

TEST_CASE("regularization report is inconclusive on short records") {
    auto d = make_discretization(1, 1.0, 16);
    RegularizationReport rep = regularization_report(trajectory(random_smooth(d, 6), 0.25));
    CHECK(rep.verdict == Verdict::inconclusive);
    CHECK_FALSE(rep.note.empty());
}

TEST_CASE("contraction check") {
    auto d = make_discretization(1, 1.0, 32);
    State a = random_smooth(d, 7);
    TrajectoryRecord ra = trajectory(a, 1.0);

    ContractionReport same = contraction_check(ra, ra, kWell);
    CHECK(same.verdict == Verdict::pass);
    for (std::size_t i = 0; i < same.rows.size(); ++i) CHECK(same.n_total(i) == 0.0);

    State b = random_smooth(d, 8);
    TrajectoryRecord rb = trajectory(b, 1.0);
    ContractionReport rep = contraction_check(ra, rb, kWell);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.lambda == 4.0);
    CHECK(rep.balance_ok);
    CHECK(rep.max_gronwall_ratio <= 1.0 + 1e-6);
    for (const auto& row : rep.rows) {
        CHECK(row.gronwall_ok);
        if (std::isfinite(row.c5)) CHECK(row.c5 >= row.c5_lower);
    }

    TrajectoryRecord shorter = trajectory(b, 0.5);
    CHECK_THROWS(contraction_check(ra, shorter, kWell));
}

TEST_CASE("contraction check flags a tampered snapshot") {
    auto d = make_discretization(1, 1.0, 32);
    TrajectoryRecord ra = trajectory(random_smooth(d, 9), 1.0);
    TrajectoryRecord rb = trajectory(random_smooth(d, 10), 1.0);
    rb.snapshots[1].state.chi.array() += 5.0;
    CHECK(contraction_check(ra, rb, kWell).verdict == Verdict::fail);
}

TEST_CASE("squeezing probe") {
    auto d = make_discretization(1, 1.0, 24);
    TrajectoryRecord ra = trajectory(random_smooth(d, 11), 1.0);
    TrajectoryRecord rb = trajectory(random_smooth(d, 12), 1.0);

    SqueezingReport same = squeezing_probe({{&ra, &ra}}, 0.25, 4);
    CHECK(same.certified);
    CHECK(same.c == 0.0);

    SqueezingReport rep = squeezing_probe({{&ra, &rb}}, 0.25, 4);
    CHECK(rep.certified);
    REQUIRE(rep.pairs.size() == 1);
    const auto& p = rep.pairs[0];
    CHECK(p.shifted <= rep.gamma * p.original + rep.c * p.projected + 1e-12);

    // Low-mode differences: the projection keeps everything, so c <= 1 suffices.
    TrajectoryRecord low = ra;
    for (auto& snap : low.snapshots) {
        snap.state.chi += 0.01 * d->spectrum(Space::V).eigenvectors.col(1);
        snap.state.theta += 0.01 * d->spectrum(Space::V0).eigenvectors.col(0);
    }
    SqueezingReport lr = squeezing_probe({{&ra, &low}}, 0.25, 4);
    CHECK(lr.certified);
    CHECK(lr.c <= 1.0 + 1e-12);

    CHECK_THROWS_AS(squeezing_probe({{&ra, &rb}}, 0.75, 4), DomainError);
}

TEST_CASE("Hölder check") {
    auto d = make_discretization(1, 1.0, 32);
    HolderReport fixed = holder_in_time_check(trajectory(constant_state(d, 1.0, -1.0), 4.0));
    CHECK(fixed.verdict == Verdict::pass);
    CHECK(fixed.c < 1e-20);

    HolderReport moving = holder_in_time_check(trajectory(random_smooth(d, 13), 4.0));
    CHECK(moving.verdict == Verdict::pass);
    CHECK(moving.exponent >= 0.4);
    CHECK(moving.c > 0.0);
    for (const auto& g : moving.gaps) CHECK(g.max_ratio <= moving.c * (1 + 1e-12));

    HolderReport coarse = holder_in_time_check(trajectory(random_smooth(d, 13), 0.5, 4));
    CHECK(coarse.verdict == Verdict::inconclusive);

    // Exponential decay sampled at gaps comparable to its time scale mimics a small exponent.
    HolderReport sparse = holder_in_time_check(trajectory(random_smooth(d, 13), 8.0, 4));
    CHECK(sparse.verdict == Verdict::inconclusive);
    CHECK(sparse.note.find("time step") != std::string::npos);
}

TEST_CASE("perturbed bundle hits the target radius and is reproducible") {
    auto d = make_discretization(1, 1.0, 32);
    State ref = constant_state(d, 1.0, 1.0);
    Bundle b = perturbed_bundle(ref, 6, 0.1, 42, kWell);
    REQUIRE(b.members.size() == 6);
    CHECK(b.radius == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(bundle_radius(b.members, ref, kWell) == doctest::Approx(b.radius));
    for (const auto& m : b.members) CHECK(m.theta.minCoeff() > 0.0);
    Bundle again = perturbed_bundle(ref, 6, 0.1, 42, kWell);
    for (std::size_t i = 0; i < 6; ++i) CHECK(again.members[i].chi == b.members[i].chi);
    Bundle other = perturbed_bundle(ref, 6, 0.1, 43, kWell);
    CHECK(other.members[0].chi != b.members[0].chi);
}

TEST_CASE("bundle results do not depend on the worker count") {
    auto d = make_discretization(1, 1.0, 24);
    Bundle b = perturbed_bundle(constant_state(d, 1.0, 1.0), 5, 0.2, 3, kWell);
    TrajectoryOptions o;
    o.t_end = 0.5;
    o.snapshot_every = 2;
    auto one = run_bundle(b.members, kWell, {}, o, 1);
    auto three = run_bundle(b.members, kWell, {}, o, 3);
    REQUIRE(one.size() == 5);
    REQUIRE(three.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(one[i].rows.size() == three[i].rows.size());
        for (std::size_t k = 0; k < one[i].rows.size(); ++k) CHECK(rows_equal(one[i].rows[k], three[i].rows[k]));
        CHECK(one[i].snapshots.back().state.chi == three[i].snapshots.back().state.chi);
    }
}

TEST_CASE("product distance") {
    auto d = make_discretization(1, 1.0, 24);
    State a = constant_state(d, 1.0, 0.0);
    State b = constant_state(d, 1.0, 2.0);
    CHECK(product_distance(a, a) == 0.0);
    CHECK(product_distance(a, b) == doctest::Approx(2.0));
    CHECK(product_distance(a, b) == product_distance(b, a));
}

TEST_CASE("attraction fit") {
    auto d = make_discretization(1, 1.0, 24);
    auto cat = build_catalog(*d, kWell);
    TrajectoryOptions o;
    o.t_end = 3.0;
    o.snapshot_every = 1;

    std::vector<State> eq_members{constant_state(d, 1.0, 1.0), constant_state(d, 1.0, -1.0)};
    AttractionReport at_rest = attraction_fit(run_bundle(eq_members, kWell, {}, o, 2), cat);
    CHECK(at_rest.floor_censored);
    CHECK(at_rest.verdict != Verdict::fail);

    Bundle b = perturbed_bundle(constant_state(d, 1.0, 1.0), 6, 0.1, 5, kWell);
    AttractionReport rep = attraction_fit(run_bundle(b.members, kWell, {}, o, 2), cat);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.kappa > 0.0);
    CHECK(rep.r_squared >= 0.9);
    CHECK(rep.monotone);
    CHECK(rep.times.size() == rep.distances.size());

    Bundle wide = perturbed_bundle(constant_state(d, 1.0, 1.0), 6, 0.2, 5, kWell);
    AttractionReport wr = attraction_fit(run_bundle(wide.members, kWell, {}, o, 2), cat);
    CHECK(wr.kappa > 0.0);
}
