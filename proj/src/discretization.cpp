#include "pfdyn/discretization.hpp"

#include "pfdyn/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace pfdyn {

namespace {

using Triplet = Eigen::Triplet<double>;

// Flat full-grid index -> per-axis coordinates (j along axis 0, i along axis 1).
struct NodeCoords {
    int j;
    int i;
};

NodeCoords coords_of(int idx, int m, int dim) {
    return dim == 1 ? NodeCoords{idx, 0} : NodeCoords{idx % m, idx / m};
}

int flat(NodeCoords c, int m, int dim) {
    return dim == 1 ? c.j : c.j + m * c.i;
}

SparseMatrix build_dirichlet_laplacian(const Grid& grid) {
    const int n = grid.n();
    const int dim = grid.dim();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const auto count = static_cast<int>(grid.interior_count());

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(count) * (1 + 2 * dim));
    for (int k = 0; k < count; ++k) {
        const int j = dim == 1 ? k : k % n;
        const int i = dim == 1 ? 0 : k / n;
        triplets.emplace_back(k, k, 2.0 * dim * inv_h2);
        if (j > 0) triplets.emplace_back(k, k - 1, -inv_h2);
        if (j < n - 1) triplets.emplace_back(k, k + 1, -inv_h2);
        if (dim == 2) {
            if (i > 0) triplets.emplace_back(k, k - n, -inv_h2);
            if (i < n - 1) triplets.emplace_back(k, k + n, -inv_h2);
        }
    }
    SparseMatrix a(count, count);
    a.setFromTriplets(triplets.begin(), triplets.end());
    return a;
}

// Mirror ghost nodes: the missing neighbour across a boundary is replaced by
// the neighbour on the other side, which doubles that off-diagonal entry.
SparseMatrix build_neumann_laplacian(const Grid& grid) {
    const int m = grid.nodes_per_axis();
    const int dim = grid.dim();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const auto count = static_cast<int>(grid.node_count());

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(count) * (1 + 2 * dim));
    for (int idx = 0; idx < count; ++idx) {
        const NodeCoords c = coords_of(idx, m, dim);
        for (int axis = 0; axis < dim; ++axis) {
            const int pos = axis == 0 ? c.j : c.i;
            const int lo = pos == 0 ? pos + 1 : pos - 1;
            const int hi = pos == m - 1 ? pos - 1 : pos + 1;
            NodeCoords left = c;
            NodeCoords right = c;
            (axis == 0 ? left.j : left.i) = lo;
            (axis == 0 ? right.j : right.i) = hi;
            triplets.emplace_back(idx, idx, 2.0 * inv_h2);
            triplets.emplace_back(idx, flat(left, m, dim), -inv_h2);
            triplets.emplace_back(idx, flat(right, m, dim), -inv_h2);
        }
    }
    SparseMatrix l(count, count);
    l.setFromTriplets(triplets.begin(), triplets.end());
    return l;
}

double relative_residual(const SparseMatrix& op, const Field& z, const Field& rhs) {
    const double denom = rhs.norm();
    const double res = (op * z - rhs).norm();
    return denom > 0.0 ? res / denom : res;
}

}  // namespace

Discretization::Discretization(Grid grid, std::size_t spectral_cap)
    : grid_(std::move(grid)), spectral_cap_(spectral_cap) {
    a_ = build_dirichlet_laplacian(grid_);
    neumann_ = build_neumann_laplacian(grid_);

    SparseMatrix identity(neumann_.rows(), neumann_.cols());
    identity.setIdentity();
    const SparseMatrix b = neumann_ + identity;
    weighted_b_ = grid_.weights().asDiagonal() * b;

    a_factor_.compute(a_);
    if (a_factor_.info() != Eigen::Success) {
        throw NumericalError("factorization of the Dirichlet operator failed", 0.0);
    }
    b_factor_.compute(weighted_b_);
    if (b_factor_.info() != Eigen::Success) {
        throw NumericalError("factorization of the Neumann operator failed", 0.0);
    }
}

void Discretization::check_full(const Field& v, const char* op) const {
    if (!grid_.is_full_field(v)) {
        throw DimensionError(std::string(op) + ": expected a full-grid field of size " +
                             std::to_string(grid_.node_count()) + ", got " +
                             std::to_string(v.size()));
    }
}

void Discretization::check_interior(const Field& v, const char* op) const {
    if (!grid_.is_interior_field(v)) {
        throw DimensionError(std::string(op) + ": expected an interior field of size " +
                             std::to_string(grid_.interior_count()) + ", got " +
                             std::to_string(v.size()));
    }
}

Field Discretization::apply_a(const Field& v) const {
    check_interior(v, "apply_A");
    return a_ * v;
}

Field Discretization::solve_a(const Field& rhs) const {
    check_interior(rhs, "solve_A");
    Field z = a_factor_.solve(rhs);
    const double res = relative_residual(a_, z, rhs);
    if (!(res <= 1e-10)) {
        throw NumericalError("solve_A: relative residual " + std::to_string(res) +
                                 " above 1e-10",
                             res);
    }
    return z;
}

Field Discretization::apply_neumann_laplacian(const Field& v) const {
    check_full(v, "apply_B");
    return neumann_ * v;
}

Field Discretization::apply_b(const Field& v) const {
    check_full(v, "apply_B");
    return neumann_ * v + v;
}

Field Discretization::solve_b(const Field& rhs) const {
    check_full(rhs, "solve_B");
    const Field weighted_rhs = grid_.weights().cwiseProduct(rhs);
    Field z = b_factor_.solve(weighted_rhs);
    const double res = relative_residual(weighted_b_, z, weighted_rhs);
    if (!(res <= 1e-10)) {
        throw NumericalError("solve_B: relative residual " + std::to_string(res) +
                                 " above 1e-10",
                             res);
    }
    return z;
}

double Discretization::inner(const Field& u, const Field& v) const {
    if (u.size() != v.size()) {
        throw DimensionError("inner: field sizes differ");
    }
    if (grid_.is_full_field(u)) {
        return (grid_.weights().array() * u.array() * v.array()).sum();
    }
    if (grid_.is_interior_field(u)) {
        return grid_.interior_weight() * u.dot(v);
    }
    throw DimensionError("inner: field size " + std::to_string(u.size()) +
                         " matches neither the full grid nor its interior");
}

double Discretization::norm_lp(const Field& v, double p) const {
    if (!(p >= 1.0)) {
        throw DomainError("norm_Lp: exponent must satisfy p >= 1, got " + std::to_string(p));
    }
    if (!grid_.is_full_field(v) && !grid_.is_interior_field(v)) {
        throw DimensionError("norm_Lp: field size " + std::to_string(v.size()) +
                             " matches neither the full grid nor its interior");
    }
    if (v.size() == 0) return 0.0;
    if (std::isinf(p)) return v.cwiseAbs().maxCoeff();

    const bool full = grid_.is_full_field(v);
    const Eigen::ArrayXd abs = v.array().abs();
    double sum;
    if (p == 2.0) {
        sum = full ? (grid_.weights().array() * abs.square()).sum()
                   : grid_.interior_weight() * abs.square().sum();
    } else {
        sum = full ? (grid_.weights().array() * abs.pow(p)).sum()
                   : grid_.interior_weight() * abs.pow(p).sum();
    }
    return std::pow(sum, 1.0 / p);
}

double Discretization::norm_v0(const Field& v) const {
    check_interior(v, "norm_V0");
    return std::sqrt(std::max(0.0, inner(a_ * v, v)));
}

double Discretization::norm_v(const Field& v) const {
    check_full(v, "norm_V");
    return std::sqrt(std::max(0.0, inner(apply_b(v), v)));
}

double Discretization::norm_dual_v0(const Field& e) const {
    check_interior(e, "norm_dual_V0");
    if (e.isZero(0.0)) return 0.0;
    return std::sqrt(std::max(0.0, inner(e, solve_a(e))));
}

const SpectralDecomposition& Discretization::spectrum(Space space) const {
    const bool is_b = space == Space::V;
    const std::size_t size = is_b ? grid_.node_count() : grid_.interior_count();
    if (size > spectral_cap_) {
        throw CapabilityError("spectral decomposition needs " + std::to_string(size) +
                              " nodes, above the configured cap of " +
                              std::to_string(spectral_cap_));
    }
    if (is_b) {
        std::call_once(spectrum_b_once_, [this] {
            // W^{1/2} B W^{-1/2} is symmetric; its eigenvectors map back to
            // W-orthonormal eigenvectors of B.
            const Eigen::VectorXd sqrt_w = grid_.weights().cwiseSqrt();
            const Eigen::VectorXd inv_sqrt_w = sqrt_w.cwiseInverse();
            const Eigen::MatrixXd dense = Eigen::MatrixXd(weighted_b_);
            const Eigen::MatrixXd sym =
                inv_sqrt_w.asDiagonal() * dense * inv_sqrt_w.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
                0.5 * (sym + sym.transpose()));
            auto out = std::make_unique<SpectralDecomposition>();
            out->eigenvalues = solver.eigenvalues();
            out->eigenvectors = inv_sqrt_w.asDiagonal() * solver.eigenvectors();
            spectrum_b_ = std::move(out);
        });
        return *spectrum_b_;
    }
    std::call_once(spectrum_a_once_, [this] {
        const Eigen::MatrixXd dense{a_};
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
        auto out = std::make_unique<SpectralDecomposition>();
        out->eigenvalues = solver.eigenvalues();
        out->eigenvectors = solver.eigenvectors() / std::sqrt(grid_.interior_weight());
        spectrum_a_ = std::move(out);
    });
    return *spectrum_a_;
}

double Discretization::norm_fractional(const Field& v, double s) const {
    check_full(v, "norm_fractional");
    if (!(s > 0.0 && s <= 2.0)) {
        throw DomainError("norm_fractional: exponent s must lie in (0, 2], got " +
                          std::to_string(s));
    }
    const SpectralDecomposition& sd = spectrum(Space::V);
    const Eigen::VectorXd coeff =
        sd.eigenvectors.transpose() * grid_.weights().cwiseProduct(v);
    const Eigen::ArrayXd scale = sd.eigenvalues.array().pow(2.0 * s);
    return std::sqrt((scale * coeff.array().square()).sum());
}

Field Discretization::project_low_modes(const Field& v, int k, Space space) const {
    if (space == Space::V) {
        check_full(v, "project_low_modes");
    } else {
        check_interior(v, "project_low_modes");
    }
    const SpectralDecomposition& sd = spectrum(space);
    if (k < 1 || k > sd.eigenvalues.size()) {
        throw DomainError("project_low_modes: k must lie in [1, " +
                          std::to_string(sd.eigenvalues.size()) + "], got " +
                          std::to_string(k));
    }
    const auto modes = sd.eigenvectors.leftCols(k);
    const Eigen::VectorXd weighted =
        space == Space::V ? Eigen::VectorXd(grid_.weights().cwiseProduct(v))
                          : Eigen::VectorXd(grid_.interior_weight() * v);
    return modes * (modes.transpose() * weighted);
}

std::shared_ptr<const Discretization> make_discretization(int dim, double extent, int n,
                                                          std::size_t spectral_cap) {
    return std::make_shared<const Discretization>(build_grid(dim, extent, n), spectral_cap);
}

}  // namespace pfdyn
