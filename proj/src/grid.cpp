#include "pfdyn/grid.hpp"

#include "pfdyn/errors.hpp"

#include <cmath>
#include <string>

namespace pfdyn {

namespace {

void check_grid_arguments(int dim, double extent, int n) {
    std::vector<std::string> violations;
    if (dim != 1 && dim != 2) {
        violations.push_back("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (n < 3) {
        violations.push_back("grid needs at least 3 interior nodes per axis, got " +
                             std::to_string(n));
    }
    if (!(extent > 0.0) || !std::isfinite(extent)) {
        violations.push_back("grid extent must be positive and finite");
    }
    if (!violations.empty()) throw ConfigError(std::move(violations));
}

}  // namespace

Grid::Grid(int dim, double extent, int n) : dim_(dim), extent_(extent), n_(n) {
    check_grid_arguments(dim, extent, n);
    h_ = extent / static_cast<double>(n + 1);
    const int m = n + 2;

    Eigen::VectorXd axis_weights = Eigen::VectorXd::Constant(m, h_);
    axis_weights[0] = 0.5 * h_;
    axis_weights[m - 1] = 0.5 * h_;

    if (dim == 1) {
        weights_ = axis_weights;
        for (int j = 0; j < m; ++j) {
            if (j == 0 || j == m - 1) {
                boundary_nodes_.push_back(j);
            } else {
                interior_nodes_.push_back(j);
            }
        }
    } else {
        weights_.resize(static_cast<Eigen::Index>(m) * m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const int idx = j + m * i;
                weights_[idx] = axis_weights[i] * axis_weights[j];
                const bool boundary = i == 0 || j == 0 || i == m - 1 || j == m - 1;
                if (boundary) {
                    boundary_nodes_.push_back(idx);
                } else {
                    interior_nodes_.push_back(idx);
                }
            }
        }
    }
}

double Grid::measure() const noexcept {
    return dim_ == 1 ? extent_ : extent_ * extent_;
}

double Grid::interior_weight() const noexcept {
    return dim_ == 1 ? h_ : h_ * h_;
}

Field Grid::coordinates(int axis) const {
    const int m = nodes_per_axis();
    Field x(static_cast<Eigen::Index>(node_count()));
    for (Eigen::Index idx = 0; idx < x.size(); ++idx) {
        const int j = static_cast<int>(idx % m);
        const int i = static_cast<int>(idx / m);
        x[idx] = h_ * static_cast<double>(axis == 0 ? j : i);
    }
    return x;
}

Field Grid::interior_coordinates(int axis) const {
    return restrict_to_interior(coordinates(axis));
}

Field Grid::restrict_to_interior(const Field& full) const {
    if (!is_full_field(full)) {
        throw DimensionError("restrict_to_interior: expected a full-grid field of size " +
                             std::to_string(node_count()) + ", got " +
                             std::to_string(full.size()));
    }
    Field out(static_cast<Eigen::Index>(interior_count()));
    for (std::size_t k = 0; k < interior_nodes_.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = full[interior_nodes_[k]];
    }
    return out;
}

Field Grid::extend_from_interior(const Field& interior, double boundary_value) const {
    if (!is_interior_field(interior)) {
        throw DimensionError("extend_from_interior: expected an interior field of size " +
                             std::to_string(interior_count()) + ", got " +
                             std::to_string(interior.size()));
    }
    Field out = Field::Constant(static_cast<Eigen::Index>(node_count()), boundary_value);
    for (std::size_t k = 0; k < interior_nodes_.size(); ++k) {
        out[interior_nodes_[k]] = interior[static_cast<Eigen::Index>(k)];
    }
    return out;
}

Grid build_grid(int dim, double extent, int n) {
    return Grid(dim, extent, n);
}

}  // namespace pfdyn
