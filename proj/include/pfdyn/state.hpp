#pragma once

#include "pfdyn/discretization.hpp"

#include <memory>

namespace pfdyn {

/// Temperature and order parameter at one time instant.
///
/// `theta` holds interior values only; the Dirichlet datum theta = 1 on the
/// boundary is implicit, so the trace of 1 - 1/theta vanishes there.
/// `chi` holds values on every node (Neumann condition).
struct State {
    std::shared_ptr<const Discretization> disc;
    Field theta;
    Field chi;
    double time = 0.0;

    const Grid& grid() const { return disc->grid(); }

    /// Throws DimensionError on size mismatch and SingularityError unless
    /// every theta is finite and strictly positive and every chi finite.
    void validate() const;

    /// Temperature on all nodes with the boundary value 1 filled in.
    Field theta_full() const;
    /// 1 - 1/theta on interior nodes.
    Field flux_potential() const;
};

State make_state(std::shared_ptr<const Discretization> disc, Field theta, Field chi,
                 double time = 0.0);

/// theta ≡ theta_value on interior nodes, chi ≡ chi_value everywhere.
State constant_state(std::shared_ptr<const Discretization> disc, double theta_value,
                     double chi_value, double time = 0.0);

/// Throws DimensionError unless both states share one grid.
void require_same_grid(const State& a, const State& b, const char* op);

}  // namespace pfdyn
