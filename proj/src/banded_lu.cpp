#include "pfdyn/detail/banded_lu.hpp"

#include "pfdyn/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>

namespace pfdyn::detail {

BandedLU::BandedLU(int n, int lower, int upper)
    : n_(n), kl_(lower), ku_(upper), ldab_(2 * lower + upper + 1),
      ab_(static_cast<std::size_t>(ldab_) * n, 0.0), pivots_(n, 0) {}

void BandedLU::set_zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

void BandedLU::add(int row, int col, double value) {
    const int offset = kl_ + ku_ + row - col;
    if (row - col > kl_ || col - row > ku_) {
        throw DimensionError("BandedLU::add: entry (" + std::to_string(row) + ", " +
                             std::to_string(col) + ") outside the band");
    }
    ab_[static_cast<std::size_t>(col) * ldab_ + offset] += value;
}

bool BandedLU::factorize() {
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(),
                                           ldab_, pivots_.data());
    return info == 0;
}

void BandedLU::solve(Eigen::VectorXd& rhs) const {
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(),
                                           ldab_, pivots_.data(), rhs.data(), n_);
    if (info != 0) throw NumericalError("banded solve failed", 0.0);
}

}  // namespace pfdyn::detail
