#include "helpers.hpp"

#include "pfdyn/discretization.hpp"
#include "pfdyn/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace pfdyn;
using testing::pi;

namespace {

Field sine_interior(const Grid& g, int k = 1) {
    Field x = g.interior_coordinates(0);
    return (k * pi * x.array() / g.extent()).sin().matrix();
}

Field cosine_full(const Grid& g, int k = 1) {
    Field x = g.coordinates(0);
    return (k * pi * x.array() / g.extent()).cos().matrix();
}

double observed_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

}  // namespace

TEST_CASE("grid spacing, weights and measure") {
    Grid g = build_grid(1, 1.0, 3);
    CHECK(g.h() == doctest::Approx(0.25));
    CHECK(g.node_count() == 5);
    CHECK(g.interior_count() == 3);
    CHECK(g.weights().sum() == doctest::Approx(1.0));
    CHECK(g.weights()[0] == doctest::Approx(0.125));

    Grid g2 = build_grid(2, 2.0, 7);
    CHECK(g2.h() == doctest::Approx(0.25));
    CHECK(g2.weights().sum() == doctest::Approx(4.0));
    CHECK(g2.node_count() == 81);
    CHECK(g2.interior_count() == 49);
    CHECK(g2.boundary_nodes().size() == 32);
    CHECK(g2.measure() == doctest::Approx(4.0));
}

TEST_CASE("grid factory rejects bad specs") {
    CHECK_THROWS_AS(build_grid(3, 1.0, 8), ConfigError);
    CHECK_THROWS_AS(build_grid(1, 1.0, 2), ConfigError);
    CHECK_THROWS_AS(build_grid(1, 0.0, 8), ConfigError);
}

TEST_CASE("interior restriction and extension round trip") {
    Grid g = build_grid(2, 1.0, 5);
    std::mt19937_64 rng(3);
    Field v = testing::uniform_field(g.interior_count(), rng);
    Field full = g.extend_from_interior(v, 1.0);
    CHECK(g.restrict_to_interior(full) == v);
    for (int b : g.boundary_nodes()) CHECK(full[b] == 1.0);
}

TEST_CASE("Dirichlet operator matches the closed-form spectrum") {
    for (int n : {8, 31}) {
        auto d = make_discretization(1, 1.0, n);
        const double h = d->grid().h();
        const auto& sp = d->spectrum(Space::V0);
        REQUIRE(sp.eigenvalues.size() == n);
        for (int k = 1; k <= n; ++k) {
            double exact = (2.0 / (h * h)) * (1.0 - std::cos(k * pi * h));
            CHECK(sp.eigenvalues[k - 1] == doctest::Approx(exact).epsilon(1e-10));
        }
    }
}

TEST_CASE("sine is an exact discrete eigenvector of A") {
    auto d = make_discretization(1, 1.0, 40);
    const double h = d->grid().h();
    for (int k : {1, 3, 7}) {
        Field s = sine_interior(d->grid(), k);
        double mu = (2.0 / (h * h)) * (1.0 - std::cos(k * pi * h));
        CHECK((d->apply_a(s) - mu * s).lpNorm<Eigen::Infinity>() < 1e-9 * mu);
    }
}

TEST_CASE("A applied to sine converges at second order") {
    std::vector<double> errors;
    for (int n : {31, 63, 127}) {
        auto d = make_discretization(1, 1.0, n);
        Field s = sine_interior(d->grid());
        errors.push_back((d->apply_a(s) - pi * pi * s).lpNorm<Eigen::Infinity>());
    }
    CHECK(observed_order(errors[0], errors[1]) > 1.9);
    CHECK(observed_order(errors[1], errors[2]) > 1.9);
}

TEST_CASE("B maps constants to themselves and cosines to shifted eigenvalues") {
    auto d = make_discretization(1, 1.0, 30);
    const double h = d->grid().h();
    Field one = Field::Ones(static_cast<Eigen::Index>(d->grid().node_count()));
    CHECK((d->apply_b(one) - one).lpNorm<Eigen::Infinity>() < 1e-10);
    Field c = cosine_full(d->grid(), 2);
    double mu = (2.0 / (h * h)) * (1.0 - std::cos(2 * pi * h)) + 1.0;
    CHECK((d->apply_b(c) - mu * c).lpNorm<Eigen::Infinity>() < 1e-9 * mu);
}

TEST_CASE("B and A are self-adjoint and positive in the quadrature inner product") {
    for (int dim : {1, 2}) {
        auto d = make_discretization(dim, 1.0, dim == 1 ? 24 : 9);
        const auto& g = d->grid();
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 5; ++trial) {
            Field u = testing::uniform_field(g.node_count(), rng);
            Field v = testing::uniform_field(g.node_count(), rng);
            CHECK(d->inner(d->apply_b(u), v) == doctest::Approx(d->inner(u, d->apply_b(v))).epsilon(1e-11));
            CHECK(d->inner(d->apply_b(u), u) > 0.0);
            Field a = testing::uniform_field(g.interior_count(), rng);
            Field b = testing::uniform_field(g.interior_count(), rng);
            CHECK(d->inner(d->apply_a(a), b) == doctest::Approx(d->inner(a, d->apply_a(b))).epsilon(1e-11));
            CHECK(d->inner(d->apply_a(a), a) > 0.0);
        }
    }
}

TEST_CASE("solves invert the operators") {
    for (int dim : {1, 2}) {
        auto d = make_discretization(dim, 1.5, dim == 1 ? 50 : 12);
        const auto& g = d->grid();
        std::mt19937_64 rng(5);
        Field v = testing::uniform_field(g.node_count(), rng);
        CHECK((d->apply_b(d->solve_b(v)) - v).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK((d->solve_b(d->apply_b(v)) - v).lpNorm<Eigen::Infinity>() < 1e-9);
        Field z = testing::uniform_field(g.interior_count(), rng);
        CHECK((d->apply_a(d->solve_a(z)) - z).lpNorm<Eigen::Infinity>() < 1e-9);
    }
}

TEST_CASE("norm examples") {
    auto d = make_discretization(1, 1.0, 63);
    const auto& g = d->grid();
    Field one = Field::Ones(static_cast<Eigen::Index>(g.node_count()));
    CHECK(d->norm_lp(one, 2.0) == doctest::Approx(1.0));
    CHECK(d->norm_lp(one, 4.0) == doctest::Approx(1.0));
    CHECK(d->norm_v(one) == doctest::Approx(1.0));
    CHECK(d->norm_lp(-3.0 * one, kInfinity) == doctest::Approx(3.0));
    Field zero = Field::Zero(static_cast<Eigen::Index>(g.interior_count()));
    CHECK(d->norm_v0(zero) == 0.0);
    CHECK(d->norm_dual_v0(zero) == 0.0);
    CHECK_THROWS_AS(d->norm_lp(one, 0.5), DomainError);
    CHECK_THROWS_AS(d->norm_v0(one), DimensionError);
    CHECK_THROWS_AS(d->norm_v(zero), DimensionError);
}

TEST_CASE("norms are homogeneous and satisfy the triangle inequality") {
    auto d = make_discretization(1, 1.0, 40);
    const auto& g = d->grid();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Field u = testing::uniform_field(g.interior_count(), rng);
        Field v = testing::uniform_field(g.interior_count(), rng);
        double a = std::uniform_real_distribution<double>(-5, 5)(rng);
        CHECK(d->norm_v0(a * u) == doctest::Approx(std::abs(a) * d->norm_v0(u)).epsilon(1e-12));
        CHECK(d->norm_dual_v0(a * u) == doctest::Approx(std::abs(a) * d->norm_dual_v0(u)).epsilon(1e-12));
        CHECK(d->norm_lp(a * u, 3.0) == doctest::Approx(std::abs(a) * d->norm_lp(u, 3.0)).epsilon(1e-12));
        CHECK(d->norm_v0(u + v) <= d->norm_v0(u) + d->norm_v0(v) + 1e-12);
        CHECK(d->norm_dual_v0(u + v) <= d->norm_dual_v0(u) + d->norm_dual_v0(v) + 1e-12);
        CHECK(d->norm_lp(u + v, 4.0) <= d->norm_lp(u, 4.0) + d->norm_lp(v, 4.0) + 1e-12);
    }
}

TEST_CASE("Riesz isometry between V0 and its dual") {
    auto d = make_discretization(2, 1.0, 10);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        Field v = testing::uniform_field(d->grid().interior_count(), rng);
        CHECK(d->norm_dual_v0(d->apply_a(v)) == doctest::Approx(d->norm_v0(v)).epsilon(1e-10));
    }
}

TEST_CASE("dual norm is bounded by the L2 norm over the first eigenvalue") {
    auto d = make_discretization(1, 1.0, 40);
    std::mt19937_64 rng(29);
    double mu1 = d->spectrum(Space::V0).eigenvalues[0];
    for (int trial = 0; trial < 10; ++trial) {
        Field v = testing::uniform_field(d->grid().interior_count(), rng);
        CHECK(d->norm_dual_v0(v) <= d->norm_l2(v) / std::sqrt(mu1) * (1 + 1e-12));
    }
}

TEST_CASE("fractional norms agree with the operator") {
    auto d = make_discretization(1, 1.0, 30);
    std::mt19937_64 rng(31);
    Field v = testing::uniform_field(d->grid().node_count(), rng);
    CHECK(d->norm_fractional(v, 1.0) == doctest::Approx(d->norm_l2(d->apply_b(v))).epsilon(1e-9));
    CHECK(d->norm_fractional(v, 0.5) == doctest::Approx(d->norm_v(v)).epsilon(1e-9));
    CHECK(d->norm_fractional(v, 1e-9) == doctest::Approx(d->norm_l2(v)).epsilon(1e-6));
    const auto& sp = d->spectrum(Space::V);
    Field e = sp.eigenvectors.col(4);
    CHECK(d->norm_fractional(e, 0.875) == doctest::Approx(std::pow(sp.eigenvalues[4], 0.875)).epsilon(1e-9));
    CHECK_THROWS_AS(d->norm_fractional(v, 0.0), DomainError);
    CHECK_THROWS_AS(d->norm_fractional(v, 2.5), DomainError);
}

TEST_CASE("spectral decompositions are orthonormal eigenpairs") {
    auto d = make_discretization(2, 1.0, 6);
    for (Space s : {Space::V, Space::V0}) {
        const auto& sp = d->spectrum(s);
        const Field& w = s == Space::V ? d->grid().weights()
                                       : Field(Field::Constant(static_cast<Eigen::Index>(d->grid().interior_count()),
                                                               d->grid().interior_weight()));
        Eigen::MatrixXd gram = sp.eigenvectors.transpose() * w.asDiagonal() * sp.eigenvectors;
        CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
        for (Eigen::Index k = 0; k < sp.eigenvalues.size(); k += 7) {
            Field e = sp.eigenvectors.col(k);
            Field ae = s == Space::V ? d->apply_b(e) : d->apply_a(e);
            CHECK((ae - sp.eigenvalues[k] * e).lpNorm<Eigen::Infinity>() < 1e-8 * sp.eigenvalues[k]);
        }
        for (Eigen::Index k = 1; k < sp.eigenvalues.size(); ++k)
            CHECK(sp.eigenvalues[k] >= sp.eigenvalues[k - 1]);
    }
}

TEST_CASE("spectral cap raises a capability error") {
    auto d = make_discretization(1, 1.0, 40, 16);
    Field v = Field::Ones(42);
    CHECK_THROWS_AS(d->spectrum(Space::V), CapabilityError);
    CHECK_THROWS_AS(d->norm_fractional(v, 0.5), CapabilityError);
    CHECK_THROWS_AS(d->project_low_modes(v, 2, Space::V), CapabilityError);
}

TEST_CASE("low-mode projection") {
    auto d = make_discretization(1, 1.0, 30);
    const auto& g = d->grid();
    Field one = Field::Ones(static_cast<Eigen::Index>(g.node_count()));
    CHECK((d->project_low_modes(one, 1, Space::V) - one).lpNorm<Eigen::Infinity>() < 1e-10);
    Field c3 = cosine_full(g, 3);
    CHECK(d->project_low_modes(c3, 3, Space::V).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((d->project_low_modes(c3, 4, Space::V) - c3).lpNorm<Eigen::Infinity>() < 1e-10);
    Field s2 = sine_interior(g, 2);
    CHECK(d->project_low_modes(s2, 1, Space::V0).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((d->project_low_modes(s2, 2, Space::V0) - s2).lpNorm<Eigen::Infinity>() < 1e-10);

    std::mt19937_64 rng(37);
    Field v = testing::uniform_field(g.node_count(), rng);
    Field p = d->project_low_modes(v, 5, Space::V);
    CHECK((d->project_low_modes(p, 5, Space::V) - p).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(d->norm_l2(p) <= d->norm_l2(v) + 1e-12);
    CHECK(std::abs(d->inner(v - p, p)) < 1e-10);
}

TEST_CASE("projection inequality: |v|² <= gamma |v|²_V + |P v|²_V once mu_{k+1} >= 1/gamma") {
    auto d = make_discretization(1, 1.0, 40);
    const auto& sp = d->spectrum(Space::V);
    std::mt19937_64 rng(41);
    for (double gamma : {0.5, 0.05, 0.005}) {
        int k = 0;
        while (k < sp.eigenvalues.size() && sp.eigenvalues[k] < 1.0 / gamma) ++k;
        for (int trial = 0; trial < 10; ++trial) {
            Field v = testing::uniform_field(d->grid().node_count(), rng);
            Field p = d->project_low_modes(v, k, Space::V);
            double lhs = std::pow(d->norm_l2(v), 2);
            double rhs = gamma * std::pow(d->norm_v(v), 2) + std::pow(d->norm_v(p), 2);
            CHECK(lhs <= rhs * (1 + 1e-12));
        }
    }
}

TEST_CASE("discrete norms converge at second order") {
    std::vector<double> e_dual, e_v0, e_v, e_l4;
    for (int n : {63, 127, 255}) {
        auto d = make_discretization(1, 1.0, n);
        const auto& g = d->grid();
        Field s = sine_interior(g);
        e_dual.push_back(std::abs(d->norm_dual_v0(s) - 1.0 / (pi * std::sqrt(2.0))));
        e_v0.push_back(std::abs(d->norm_v0(s) - pi / std::sqrt(2.0)));
        e_v.push_back(std::abs(d->norm_v(cosine_full(g)) - std::sqrt((pi * pi + 1.0) / 2.0)));
        e_l4.push_back(std::abs(d->norm_lp(g.coordinates(0), 4.0) - std::pow(0.2, 0.25)));
    }
    for (const auto* e : {&e_dual, &e_v0, &e_v, &e_l4}) {
        CHECK(observed_order((*e)[0], (*e)[1]) > 1.9);
        CHECK(observed_order((*e)[1], (*e)[2]) > 1.9);
    }
}
