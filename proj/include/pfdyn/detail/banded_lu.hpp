#pragma once

#include <Eigen/Core>

#include <vector>

namespace pfdyn::detail {

/// General banded matrix with LU factorization (partial pivoting) via LAPACK
/// dgbtrf/dgbtrs. Column-major band storage with room for the fill-in rows.
class BandedLU {
public:
    BandedLU(int n, int lower, int upper);

    int size() const noexcept { return n_; }

    void set_zero();
    /// Accumulates `value` into A(row, col); the entry must lie inside the band.
    void add(int row, int col, double value);

    /// Returns false when the matrix is singular.
    bool factorize();
    /// Overwrites rhs with A^{-1} rhs. Requires a successful factorize().
    void solve(Eigen::VectorXd& rhs) const;

private:
    int n_;
    int kl_;
    int ku_;
    int ldab_;
    std::vector<double> ab_;
    std::vector<int> pivots_;
};

}  // namespace pfdyn::detail
