#include "helpers.hpp"

#include "pfdyn/errors.hpp"
#include "pfdyn/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pfdyn;
using testing::pi;

TEST_CASE("double well values and derivatives") {
    Potential w = Potential::double_well();
    CHECK(w.value(0.0) == doctest::Approx(1.0));
    CHECK(w.value(1.0) == doctest::Approx(0.0));
    CHECK(w.value(-1.0) == doctest::Approx(0.0));
    CHECK(w.derivative(0.0) == 0.0);
    CHECK(w.derivative(2.0) == doctest::Approx(24.0));
    CHECK(w.second_derivative(0.0) == doctest::Approx(-4.0));
    CHECK(w.lambda() == 4.0);
    CHECK(w.check_hypotheses().empty());
}

TEST_CASE("potential derivatives match central differences") {
    Potential w = Potential::polynomial({0.0, 0.0, -1.0, 0.5, 0.25}, 3.0, "quartic");
    for (double r : {-2.0, -0.7, 0.0, 0.3, 1.9}) {
        const double d = 1e-5;
        CHECK(w.derivative(r) == doctest::Approx((w.value(r + d) - w.value(r - d)) / (2 * d)).epsilon(1e-8));
        CHECK(w.second_derivative(r) ==
              doctest::Approx((w.derivative(r + d) - w.derivative(r - d)) / (2 * d)).epsilon(1e-8));
    }
}

TEST_CASE("beta is nondecreasing for a semiconvex potential") {
    Potential w = Potential::double_well();
    double prev = w.beta(-5.0);
    for (int i = 1; i <= 2000; ++i) {
        double r = -5.0 + i * 0.005;
        double b = w.beta(r);
        CHECK(b >= prev - 1e-12);
        prev = b;
    }
    CHECK(w.beta(0.0) == 0.0);
}

TEST_CASE("hypothesis checks flag bad potentials") {
    CHECK_FALSE(Potential::polynomial({0.0, 1.0, 0.0, 0.0, 1.0}, 0.0).check_hypotheses().empty());
    CHECK_FALSE(Potential::polynomial({0.0, 0.0, -1.0, 0.0, 0.0}, 2.0).check_hypotheses().empty());
    CHECK_FALSE(Potential::polynomial({1.0, 0.0, -2.0, 0.0, 1.0}, 1.0).check_hypotheses().empty());
}

TEST_CASE("derivative roots of the double well") {
    auto roots = Potential::double_well().derivative_roots();
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-1.0));
    CHECK(roots[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(roots[2] == doctest::Approx(1.0));
}

TEST_CASE("energy examples") {
    auto d = make_discretization(1, 1.0, 32);
    Potential w = Potential::double_well();
    CHECK(energy(constant_state(d, 1.0, 0.0), w).total == doctest::Approx(2.0));
    CHECK(energy(constant_state(d, 1.0, 1.0), w).total == doctest::Approx(1.0));
    EnergyReport e = energy(constant_state(d, 1.0, 1.0), w);
    CHECK(e.quadratic == doctest::Approx(0.5));
    CHECK(e.potential == doctest::Approx(-0.5));
    CHECK(e.gradient == doctest::Approx(0.0));
    // theta ≡ e on the interior only; the boundary value 1 enters through the quadrature weights.
    State s = constant_state(d, std::exp(1.0), 1.0);
    double interior_mass = d->grid().interior_weight() * static_cast<double>(d->grid().interior_count());
    CHECK(energy(s, w).entropy == doctest::Approx(interior_mass * (std::exp(1.0) - 1.0) + (1.0 - interior_mass)));
}

TEST_CASE("energy parts add up and are bounded below") {
    auto d = make_discretization(1, 2.0, 40);
    Potential w = Potential::double_well();
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        State s = testing::random_state(d, rng, 0.01, 50.0, 3.0);
        EnergyReport e = energy(s, w);
        CHECK(e.total == doctest::Approx(e.entropy + e.quadratic + e.gradient + e.potential));
        CHECK(e.entropy >= d->grid().measure() - 1e-12);
        CHECK(e.gradient >= 0.0);
        CHECK(e.quadratic + e.potential >= -1e-12);
    }
}

TEST_CASE("gradient energy of a cosine converges to the continuum value") {
    Potential w = Potential::double_well();
    double prev_err = 0.0;
    for (int n : {63, 127}) {
        auto d = make_discretization(1, 1.0, n);
        Field x = d->grid().coordinates(0);
        Field chi = (pi * x.array()).cos().matrix();
        State s = make_state(d, Field::Ones(n), chi);
        double err = std::abs(energy(s, w).gradient - pi * pi / 4.0);
        if (prev_err > 0.0) CHECK(std::log2(prev_err / err) > 1.9);
        prev_err = err;
    }
}

TEST_CASE("energy rejects nonpositive temperature") {
    auto d = make_discretization(1, 1.0, 16);
    State s = constant_state(d, 1.0, 0.0);
    s.theta[3] = 0.0;
    CHECK_THROWS_AS(energy(s, Potential::double_well()), SingularityError);
    s.theta[3] = -1.0;
    CHECK_THROWS_AS(s.validate(), SingularityError);
}

TEST_CASE("dissipation examples") {
    auto d = make_discretization(1, 1.0, 32);
    Field zero_rate = Field::Zero(34);
    CHECK(dissipation(constant_state(d, 1.0, 0.3), zero_rate) == 0.0);
    CHECK(dissipation(constant_state(d, 1.0, 0.3), Field::Constant(34, 2.0)) == doctest::Approx(4.0));

    // 1 - 1/theta = 0.1 sin(pi x): the V0 part is 0.01 times the first Dirichlet eigenvalue / 2.
    const double h = d->grid().h();
    Field x = d->grid().interior_coordinates(0);
    Field u = 0.1 * (pi * x.array()).sin().matrix();
    Field theta = (1.0 / (1.0 - u.array())).matrix();
    double mu1 = (2.0 / (h * h)) * (1.0 - std::cos(pi * h));
    CHECK(dissipation(make_state(d, theta, Field::Zero(34)), zero_rate) == doctest::Approx(0.005 * mu1));
}

TEST_CASE("metric examples and axioms") {
    auto d = make_discretization(1, 1.0, 24);
    Potential w = Potential::double_well();
    State a = constant_state(d, 1.0, 0.0);
    CHECK(metric_dx(a, a, w) == 0.0);
    State b = constant_state(d, 1.0, 1.0);
    // chi difference of one: ||B^{7/8} 1|| = 1, beta difference = |beta(1) - beta(0)| = 4.
    CHECK(metric_dx(a, b, w) == doctest::Approx(5.0));

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        State x = testing::random_state(d, rng, 0.2, 3.0);
        State y = testing::random_state(d, rng, 0.2, 3.0);
        State z = testing::random_state(d, rng, 0.2, 3.0);
        double xy = metric_dx(x, y, w);
        CHECK(xy > 0.0);
        CHECK(xy == doctest::Approx(metric_dx(y, x, w)).epsilon(1e-12));
        CHECK(xy <= metric_dx(x, z, w) + metric_dx(z, y, w) + 1e-10);
    }
}

TEST_CASE("metric parameter validation") {
    CHECK_THROWS_AS((MetricParams{3.0, 0.5}.validate()), DomainError);
    CHECK_THROWS_AS((MetricParams{4.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((MetricParams{4.0, 0.0}.validate()), DomainError);
    CHECK_NOTHROW((MetricParams{3.5, 0.25}.validate()));
    auto d = make_discretization(1, 1.0, 8);
    State a = constant_state(d, 1.0, 0.0);
    CHECK_THROWS_AS(metric_dx(a, a, Potential::double_well(), MetricParams{2.0, 0.5}), DomainError);
}

TEST_CASE("metric rejects mixed grids") {
    auto d1 = make_discretization(1, 1.0, 8);
    auto d2 = make_discretization(1, 1.0, 9);
    CHECK_THROWS_AS(metric_dx(constant_state(d1, 1, 0), constant_state(d2, 1, 0), Potential::double_well()),
                    DimensionError);
}

TEST_CASE("energy depends continuously on the state in the metric") {
    auto d = make_discretization(1, 1.0, 32);
    Potential w = Potential::double_well();
    std::mt19937_64 rng(19);
    State base = testing::random_state(d, rng, 0.5, 2.0, 0.8);
    Field dir_theta = testing::uniform_field(d->grid().interior_count(), rng);
    Field dir_chi = testing::uniform_field(d->grid().node_count(), rng);
    double prev_gap = 1.0;
    for (double s : {1e-2, 1e-3, 1e-4}) {
        State p = base;
        p.theta = (base.theta.array() * (s * dir_theta.array()).exp()).matrix();
        p.chi = base.chi + s * dir_chi;
        double gap = std::abs(energy(p, w).total - energy(base, w).total);
        CHECK(metric_dx(p, base, w) < 10 * s * 100);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("enthalpy examples") {
    auto d = make_discretization(1, 1.0, 8);
    Field e = enthalpy(constant_state(d, 2.0, 0.5));
    CHECK(e[0] == doctest::Approx(1.5));
    CHECK(e[9] == doctest::Approx(1.5));
    CHECK(e[4] == doctest::Approx(2.5));
}
