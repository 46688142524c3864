#include "helpers.hpp"

#include "pfdyn/errors.hpp"
#include "pfdyn/stationary.hpp"
#include "pfdyn/stepper.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace pfdyn;

TEST_CASE("Newton finds the wells from nearby constants") {
    auto d = make_discretization(1, 1.0, 32);
    Potential w = Potential::double_well();
    Equilibrium plus = solve_equilibrium(*d, w, Field::Constant(34, 0.9));
    CHECK((plus.chi.array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK(plus.residual_norm <= 1e-10);
    CHECK(plus.stability == "stable");
    CHECK(plus.label.find("constant") == 0);
    Equilibrium minus = solve_equilibrium(*d, w, Field::Constant(34, -0.9));
    CHECK((minus.chi.array() + 1.0).abs().maxCoeff() < 1e-10);
    Equilibrium zero = solve_equilibrium(*d, w, Field::Zero(34));
    CHECK(zero.stability == "unstable");
    CHECK(zero.smallest_eigenvalue == doctest::Approx(-4.0));
    CHECK(plus.smallest_eigenvalue == doctest::Approx(8.0));
}

TEST_CASE("solving from a solution is idempotent") {
    auto d = make_discretization(1, 4.0, 64);
    Potential w = Potential::double_well();
    Field x = d->grid().coordinates(0);
    Field guess = ((x.array() - 2.0) / 0.4).tanh().matrix();
    Equilibrium e = solve_equilibrium(*d, w, guess);
    CHECK(equilibrium_residual(*d, w, e.chi).lpNorm<Eigen::Infinity>() <= 1e-10);
    Equilibrium again = solve_equilibrium(*d, w, e.chi);
    CHECK(again.newton_iterations == 0);
    CHECK((again.chi - e.chi).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("equilibrium residual vanishes exactly at the roots of W'") {
    auto d = make_discretization(2, 1.0, 8);
    Potential w = Potential::double_well();
    for (double r : w.derivative_roots()) {
        Field chi = Field::Constant(static_cast<Eigen::Index>(d->grid().node_count()), r);
        CHECK(equilibrium_residual(*d, w, chi).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("nonconvergence raises NumericalError with the residual") {
    auto d = make_discretization(1, 1.0, 32);
    EquilibriumOptions o;
    o.max_iters = 1;
    try {
        solve_equilibrium(*d, Potential::double_well(), Field::Constant(34, 3.0), o);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.residual() > o.tol);
    }
}

TEST_CASE("catalog on the unit interval holds the constant roots") {
    auto d = make_discretization(1, 1.0, 32);
    Potential w = Potential::double_well();
    auto cat = build_catalog(*d, w);
    auto roots = w.derivative_roots();
    REQUIRE(cat.size() >= roots.size());
    for (double r : roots) {
        bool found = std::any_of(cat.begin(), cat.end(), [&](const Equilibrium& e) {
            return (e.chi.array() - r).abs().maxCoeff() < 1e-8;
        });
        CHECK(found);
    }
    for (std::size_t i = 0; i < cat.size(); ++i) {
        CHECK(cat[i].residual_norm <= 1e-10);
        for (std::size_t j = i + 1; j < cat.size(); ++j) CHECK(d->norm_l2(cat[i].chi - cat[j].chi) > 1e-6);
    }
}

TEST_CASE("catalog on a long interval contains a kink") {
    auto d = make_discretization(1, 6.0, 96);
    auto cat = build_catalog(*d, Potential::double_well());
    bool kink = std::any_of(cat.begin(), cat.end(), [](const Equilibrium& e) { return e.label == "kink"; });
    CHECK(kink);
    for (const auto& e : cat)
        if (e.label == "kink") CHECK(e.stability == "unstable");
}

TEST_CASE("catalog entries are fixed points of the stepper") {
    auto d = make_discretization(1, 4.0, 64);
    Potential w = Potential::double_well();
    Stepper s(d, w, {});
    for (const auto& e : build_catalog(*d, w)) {
        State st = equilibrium_state(d, e);
        State next = s.step(st).state;
        CHECK((next.chi - st.chi).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK((next.theta - st.theta).lpNorm<Eigen::Infinity>() < 1e-9);
    }
}

TEST_CASE("equilibrium distance") {
    auto d = make_discretization(1, 1.0, 32);
    Potential w = Potential::double_well();
    auto cat = build_catalog(*d, w);
    for (std::size_t i = 0; i < cat.size(); ++i) {
        auto r = equilibrium_distance(equilibrium_state(d, cat[i]), cat, w);
        CHECK(r.distance == 0.0);
        CHECK(r.index == i);
        CHECK(r.label == cat[i].label);
    }
    std::vector<Equilibrium> reversed(cat.rbegin(), cat.rend());
    std::mt19937_64 rng(2);
    State probe = testing::random_state(d, rng, 0.8, 1.2, 1.2);
    CHECK(equilibrium_distance(probe, cat, w).distance == equilibrium_distance(probe, reversed, w).distance);

    State near = constant_state(d, 1.0, 1.0);
    double prev = 0.0;
    for (double eps : {1e-3, 1e-2, 1e-1}) {
        near.chi = Field::Constant(34, 1.0 + eps);
        double dist = equilibrium_distance(near, cat, w).distance;
        CHECK(dist > prev);
        prev = dist;
    }
    CHECK_THROWS_AS(equilibrium_distance(probe, {}, w), DomainError);
}

TEST_CASE("linearized eigenvalue respects the spectral cap") {
    auto d = make_discretization(1, 1.0, 40, 16);
    CHECK_THROWS_AS(smallest_linearized_eigenvalue(*d, Potential::double_well(), Field::Ones(42)),
                    CapabilityError);
}
