#include "pfdyn/state.hpp"

#include "pfdyn/errors.hpp"

#include <cmath>
#include <string>

namespace pfdyn {

void State::validate() const {
    if (!disc) throw DimensionError("state has no grid");
    const Grid& g = disc->grid();
    if (!g.is_interior_field(theta)) {
        throw DimensionError("state: theta must have " + std::to_string(g.interior_count()) +
                             " interior values, got " + std::to_string(theta.size()));
    }
    if (!g.is_full_field(chi)) {
        throw DimensionError("state: chi must have " + std::to_string(g.node_count()) +
                             " node values, got " + std::to_string(chi.size()));
    }
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (!(theta[i] > 0.0) || !std::isfinite(theta[i])) {
            throw SingularityError("state: theta must be finite and strictly positive; theta[" +
                                   std::to_string(i) + "] = " + std::to_string(theta[i]));
        }
    }
    if (!chi.allFinite()) throw SingularityError("state: chi has non-finite values");
}

Field State::theta_full() const { return disc->grid().extend_from_interior(theta, 1.0); }

Field State::flux_potential() const {
    return theta.unaryExpr([](double t) { return 1.0 - 1.0 / t; });
}

State make_state(std::shared_ptr<const Discretization> disc, Field theta, Field chi,
                 double time) {
    State s{std::move(disc), std::move(theta), std::move(chi), time};
    s.validate();
    return s;
}

State constant_state(std::shared_ptr<const Discretization> disc, double theta_value,
                     double chi_value, double time) {
    const Grid& g = disc->grid();
    Field theta = Field::Constant(static_cast<Eigen::Index>(g.interior_count()), theta_value);
    Field chi = Field::Constant(static_cast<Eigen::Index>(g.node_count()), chi_value);
    return make_state(std::move(disc), std::move(theta), std::move(chi), time);
}

void require_same_grid(const State& a, const State& b, const char* op) {
    if (a.disc != b.disc && !(a.disc->grid() == b.disc->grid())) {
        throw DimensionError(std::string(op) + ": states live on different grids");
    }
}

}  // namespace pfdyn
