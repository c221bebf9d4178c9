// phase_grid.hpp: uniform tensor-product grids over extended phase space.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace nhbrack {

enum class Boundary { Truncated, Periodic };

struct GridAxis {
    std::string name;
    double min{0.0};
    double max{1.0};
    int nodes{8};
    Boundary boundary{Boundary::Truncated};

    // Truncated axes include both end points; periodic axes omit max.
    double spacing() const;
    double coord(int i) const { return min + i * spacing(); }
    double weight(int i) const;  // trapezoid rule
};

class PhaseGrid {
public:
    explicit PhaseGrid(std::vector<GridAxis> axes);

    int dims() const { return static_cast<int>(axes_.size()); }
    const GridAxis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    const std::vector<GridAxis>& axes() const { return axes_; }
    std::size_t size() const { return size_; }
    std::size_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }
    int axis_index(const std::string& name) const;  // -1 when absent

    // Multi-index of flat node `k` (first axis slowest).
    int index_along(std::size_t k, int a) const {
        return static_cast<int>((k / strides_[static_cast<std::size_t>(a)]) % static_cast<std::size_t>(axes_[static_cast<std::size_t>(a)].nodes));
    }
    double coord(std::size_t k, int a) const { return axis(a).coord(index_along(k, a)); }
    Eigen::VectorXd point(std::size_t k) const;
    double weight(std::size_t k) const;  // product of trapezoid weights

    bool same_shape(const PhaseGrid& other) const;

private:
    std::vector<GridAxis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_{0};
};

enum class DiffScheme {
    Central4,  // 4th-order central; 5-point one-sided near truncated edges
    Spectral,  // Fourier collocation, periodic axes only
};

// Dense periodic Fourier differentiation matrix for `n` nodes over period `length`.
Eigen::MatrixXd spectral_diff_matrix(int n, double length);

// d/dX_axis of node data with `comp` complex components per node.
void differentiate(const PhaseGrid& grid, int axis, DiffScheme scheme, const std::complex<double>* in,
                   std::complex<double>* out, std::size_t comp);

}  // namespace nhbrack
