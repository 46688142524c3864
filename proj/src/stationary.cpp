#include "pfdyn/stationary.hpp"

#include "pfdyn/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pfdyn {

Field equilibrium_residual(const Discretization& disc, const Potential& potential,
                           const Field& chi) {
    if (!disc.grid().is_full_field(chi)) {
        throw DimensionError("equilibrium_residual: chi must live on all nodes");
    }
    return disc.matrix_neumann_laplacian() * chi + potential.derivative(chi);
}

double smallest_linearized_eigenvalue(const Discretization& disc, const Potential& potential,
                                      const Field& chi) {
    const Grid& g = disc.grid();
    if (g.node_count() > disc.spectral_cap()) {
        throw CapabilityError("stability analysis needs a dense eigensolve; " +
                              std::to_string(g.node_count()) + " nodes exceed the cap of " +
                              std::to_string(disc.spectral_cap()));
    }
    // W L_N is symmetric, so W^{1/2} L_N W^{-1/2} is the symmetric form.
    const Eigen::VectorXd sw = g.weights().cwiseSqrt();
    const Eigen::MatrixXd l{disc.matrix_neumann_laplacian()};
    Eigen::MatrixXd m = sw.asDiagonal() * l * sw.cwiseInverse().asDiagonal();
    m = 0.5 * (m + m.transpose()).eval();
    m.diagonal() += potential.second_derivative(chi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[0];
}

namespace {

std::string describe(const Grid& g, const Field& chi) {
    const double lo = chi.minCoeff();
    const double hi = chi.maxCoeff();
    char buf[64];
    if (hi - lo < 1e-8) {
        const double c = 0.5 * (hi + lo);
        std::snprintf(buf, sizeof buf, "constant %+.6g", std::abs(c) < 1e-12 ? 0.0 : c);
        return buf;
    }
    if (g.dim() != 1) return "nonconstant";
    int crossings = 0;
    for (Eigen::Index i = 1; i < chi.size(); ++i) {
        if ((chi[i - 1] < 0.0) != (chi[i] < 0.0)) ++crossings;
    }
    if (crossings == 1) return "kink";
    if (crossings == 0) return "nonconstant";
    std::snprintf(buf, sizeof buf, "multi-kink %d", crossings);
    return buf;
}

}  // namespace

Equilibrium solve_equilibrium(const Discretization& disc, const Potential& potential,
                              const Field& guess, const EquilibriumOptions& options) {
    const Grid& g = disc.grid();
    if (!g.is_full_field(guess)) {
        throw DimensionError("solve_equilibrium: guess must live on all nodes");
    }
    if (!guess.allFinite()) throw DomainError("solve_equilibrium: guess is not finite");

    const SparseMatrix& l = disc.matrix_neumann_laplacian();
    Field chi = guess;
    Field r = equilibrium_residual(disc, potential, chi);
    double res = r.cwiseAbs().maxCoeff();
    int iters = 0;

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    while (res > options.tol) {
        if (iters >= options.max_iters) {
            std::ostringstream os;
            os << "equilibrium Newton did not converge in " << options.max_iters
               << " iterations; last residual " << res;
            throw NumericalError(os.str(), res);
        }
        ++iters;
        SparseMatrix j = l;
        j.diagonal() += potential.second_derivative(chi);
        if (!analyzed) {
            lu.analyzePattern(j);
            analyzed = true;
        }
        lu.factorize(j);
        if (lu.info() != Eigen::Success) {
            throw NumericalError("equilibrium Newton: singular linearization", res);
        }
        const Field d = lu.solve(-r);
        if (!d.allFinite()) {
            throw NumericalError("equilibrium Newton: non-finite update", res);
        }

        double alpha = 1.0;
        const double merit = r.norm();
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            const Field trial = chi + alpha * d;
            const Field rt = equilibrium_residual(disc, potential, trial);
            if (rt.allFinite() && (rt.norm() < merit || rt.cwiseAbs().maxCoeff() <= options.tol)) {
                chi = trial;
                r = rt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            throw NumericalError("equilibrium Newton: line search stalled", res);
        }
        res = r.cwiseAbs().maxCoeff();
    }

    Equilibrium eq;
    eq.chi = std::move(chi);
    eq.residual_norm = res;
    eq.newton_iterations = iters;
    eq.smallest_eigenvalue = smallest_linearized_eigenvalue(disc, potential, eq.chi);
    if (std::abs(eq.smallest_eigenvalue) <= options.marginal_tol) {
        eq.stability = "marginal";
    } else {
        eq.stability = eq.smallest_eigenvalue > 0.0 ? "stable" : "unstable";
    }
    eq.label = describe(g, eq.chi);
    return eq;
}

std::vector<Equilibrium> build_catalog(const Discretization& disc, const Potential& potential,
                                       const CatalogSeeds& seeds,
                                       const EquilibriumOptions& options) {
    const Grid& g = disc.grid();
    const Field x = g.coordinates(0);
    const double len = g.extent();
    const auto n = static_cast<Eigen::Index>(g.node_count());
    constexpr double pi = 3.14159265358979323846;

    std::vector<Field> guesses;
    for (double c : seeds.constants) guesses.push_back(Field::Constant(n, c));
    for (int k = 1; k <= seeds.modes; ++k) {
        guesses.push_back(seeds.mode_amplitude * (k * pi * x.array() / len).cos().matrix());
    }
    for (double w : seeds.tanh_widths) {
        const Field t = ((x.array() - 0.5 * len) / (w * len)).tanh().matrix();
        guesses.push_back(t);
        guesses.push_back(-t);
    }

    std::vector<Equilibrium> out;
    for (const Field& guess : guesses) {
        Equilibrium eq;
        try {
            eq = solve_equilibrium(disc, potential, guess, options);
        } catch (const NumericalError&) {
            continue;
        }
        bool duplicate = false;
        for (const auto& e : out) {
            if (disc.norm_l2(e.chi - eq.chi) < seeds.dedupe_tol) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) out.push_back(std::move(eq));
    }
    return out;
}

State equilibrium_state(std::shared_ptr<const Discretization> disc, const Equilibrium& eq,
                        double time) {
    const auto m = static_cast<Eigen::Index>(disc->grid().interior_count());
    return make_state(std::move(disc), Field::Ones(m), eq.chi, time);
}

EquilibriumDistance equilibrium_distance(const State& state,
                                         const std::vector<Equilibrium>& catalog,
                                         const Potential& potential,
                                         const MetricParams& params) {
    if (catalog.empty()) throw DomainError("equilibrium_distance: empty catalog");
    EquilibriumDistance best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const State target = equilibrium_state(state.disc, catalog[i], state.time);
        const double d = metric_dx(state, target, potential, params);
        if (d < best.distance) {
            best.distance = d;
            best.label = catalog[i].label;
            best.index = i;
        }
    }
    return best;
}

}  // namespace pfdyn
