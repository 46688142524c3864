#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace pfdyn {

/// Nodal field. Temperature-like fields live on interior nodes only,
/// order-parameter fields on all nodes of the grid.
using Field = Eigen::VectorXd;

/// Uniform node grid of the box (0, extent)^dim, dim in {1, 2}.
///
/// There are n interior nodes per axis plus one boundary node at each end,
/// so h = extent / (n + 1). Quadrature is the tensor trapezoidal rule
/// (lumped mass): interior weight h^dim, halved once per boundary axis.
/// Full-grid node (i, j) has flat index j + (n + 2) * i; the first axis is j.
class Grid {
public:
    Grid(int dim, double extent, int n);

    int dim() const noexcept { return dim_; }
    double extent() const noexcept { return extent_; }
    int n() const noexcept { return n_; }
    double h() const noexcept { return h_; }

    /// |Omega| = extent^dim.
    double measure() const noexcept;

    int nodes_per_axis() const noexcept { return n_ + 2; }
    std::size_t node_count() const noexcept { return weights_.size(); }
    std::size_t interior_count() const noexcept { return interior_nodes_.size(); }

    const Field& weights() const noexcept { return weights_; }
    /// Weight of every interior node (identical for all of them).
    double interior_weight() const noexcept;

    const std::vector<int>& boundary_nodes() const noexcept { return boundary_nodes_; }
    const std::vector<int>& interior_nodes() const noexcept { return interior_nodes_; }

    /// Coordinate along `axis` of every full-grid node.
    Field coordinates(int axis) const;
    /// Coordinate along `axis` of every interior node.
    Field interior_coordinates(int axis) const;

    /// Full-grid field -> its values on interior nodes.
    Field restrict_to_interior(const Field& full) const;
    /// Interior field -> full-grid field carrying `boundary_value` on the boundary.
    Field extend_from_interior(const Field& interior, double boundary_value) const;

    bool is_full_field(const Field& v) const noexcept {
        return static_cast<std::size_t>(v.size()) == node_count();
    }
    bool is_interior_field(const Field& v) const noexcept {
        return static_cast<std::size_t>(v.size()) == interior_count();
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.dim_ == b.dim_ && a.extent_ == b.extent_ && a.n_ == b.n_;
    }

private:
    int dim_;
    double extent_;
    int n_;
    double h_;
    Field weights_;
    std::vector<int> boundary_nodes_;
    std::vector<int> interior_nodes_;
};

/// Validating factory; throws ConfigError on dim not in {1,2}, n < 3 or extent <= 0.
Grid build_grid(int dim, double extent, int n);

}  // namespace pfdyn
