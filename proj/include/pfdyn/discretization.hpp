#pragma once

#include "pfdyn/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>

namespace pfdyn {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Eigenpairs of a discrete operator, ascending, with eigenvectors (columns)
/// orthonormal in the quadrature inner product of the grid.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

/// Which Riesz operator a projection refers to: V uses B on all nodes,
/// V0 uses A on interior nodes.
enum class Space { V, V0 };

inline constexpr std::size_t kDefaultSpectralCap = 4096;

/// Finite-difference Riesz operators of one grid and the discrete norms built on them.
///
/// A is the 2nd-order Dirichlet Laplacian acting on interior nodes (zero boundary trace).
/// B = -Laplacian_N + I acts on all nodes with mirror ghost nodes for the
/// homogeneous Neumann condition; it is self-adjoint in the lumped quadrature
/// inner product and maps constants to themselves.
///
/// Immutable after construction. Spectral decompositions are computed on first
/// use under a once-flag, so a single instance can be shared across threads.
class Discretization {
public:
    explicit Discretization(Grid grid, std::size_t spectral_cap = kDefaultSpectralCap);

    Discretization(const Discretization&) = delete;
    Discretization& operator=(const Discretization&) = delete;

    const Grid& grid() const noexcept { return grid_; }
    std::size_t spectral_cap() const noexcept { return spectral_cap_; }

    /// Stiffness matrix of A (interior nodes); ⟨Av, z⟩ is the discrete Dirichlet form.
    const SparseMatrix& matrix_a() const noexcept { return a_; }
    /// -Laplacian with Neumann closure on all nodes; B = this + I.
    const SparseMatrix& matrix_neumann_laplacian() const noexcept { return neumann_; }

    Field apply_a(const Field& v) const;
    /// Solves A z = rhs by sparse Cholesky; throws NumericalError above 1e-10 relative residual.
    Field solve_a(const Field& rhs) const;
    Field apply_b(const Field& v) const;
    Field solve_b(const Field& rhs) const;
    /// -Laplacian_N v (the gradient part of B).
    Field apply_neumann_laplacian(const Field& v) const;

    /// Quadrature inner product. Both fields must be full or both interior.
    double inner(const Field& u, const Field& v) const;

    /// (sum_i w_i |v_i|^p)^(1/p); max norm for p = infinity. Throws DomainError for p < 1.
    double norm_lp(const Field& v, double p) const;
    double norm_l2(const Field& v) const { return norm_lp(v, 2.0); }
    /// sqrt⟨Av, v⟩ for an interior field.
    double norm_v0(const Field& v) const;
    /// sqrt⟨Bv, v⟩ for a full field.
    double norm_v(const Field& v) const;
    /// sqrt⟨e, A^{-1} e⟩: the discrete H^{-1} norm of an interior field.
    double norm_dual_v0(const Field& e) const;
    /// ||B^s v|| via the spectral decomposition of B, s in (0, 2].
    double norm_fractional(const Field& v, double s) const;

    /// Orthogonal projection onto the k lowest eigenmodes of B (Space::V) or A (Space::V0).
    Field project_low_modes(const Field& v, int k, Space space) const;

    /// Lazily computed; throws CapabilityError when the operator exceeds the node cap.
    const SpectralDecomposition& spectrum(Space space) const;

private:
    void check_full(const Field& v, const char* op) const;
    void check_interior(const Field& v, const char* op) const;

    Grid grid_;
    std::size_t spectral_cap_;
    SparseMatrix a_;
    SparseMatrix neumann_;
    SparseMatrix weighted_b_;  // W * B, symmetric positive definite
    Eigen::SimplicialLDLT<SparseMatrix> a_factor_;
    Eigen::SimplicialLDLT<SparseMatrix> b_factor_;

    mutable std::once_flag spectrum_b_once_;
    mutable std::once_flag spectrum_a_once_;
    mutable std::unique_ptr<SpectralDecomposition> spectrum_b_;
    mutable std::unique_ptr<SpectralDecomposition> spectrum_a_;
};

/// Convenience: build the grid and wrap the operators in a shareable handle.
std::shared_ptr<const Discretization> make_discretization(
    int dim, double extent, int n, std::size_t spectral_cap = kDefaultSpectralCap);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace pfdyn
