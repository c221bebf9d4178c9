// phase_grid.cpp: tensor-product phase-space grids and derivative stencils.
#include "nhbrack/phase_grid.hpp"

#include "nhbrack/errors.hpp"

#include <cmath>
#include <numbers>

namespace nhbrack {

double GridAxis::spacing() const {
    return boundary == Boundary::Periodic ? (max - min) / nodes : (max - min) / (nodes - 1);
}

double GridAxis::weight(int i) const {
    const double h = spacing();
    if (boundary == Boundary::Truncated && (i == 0 || i == nodes - 1)) return 0.5 * h;
    return h;
}

PhaseGrid::PhaseGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw StructuralError("grid needs at least one axis");
    for (const auto& a : axes_) {
        if (a.nodes < 8) throw StructuralError("axis '" + a.name + "' needs >= 8 nodes");
        if (!(a.max > a.min)) throw StructuralError("axis '" + a.name + "' needs max > min");
    }
    strides_.assign(axes_.size(), 1);
    size_ = 1;
    for (int a = dims() - 1; a >= 0; --a) {
        strides_[static_cast<std::size_t>(a)] = size_;
        size_ *= static_cast<std::size_t>(axes_[static_cast<std::size_t>(a)].nodes);
    }
}

int PhaseGrid::axis_index(const std::string& name) const {
    for (int a = 0; a < dims(); ++a) {
        if (axis(a).name == name) return a;
    }
    return -1;
}

Eigen::VectorXd PhaseGrid::point(std::size_t k) const {
    Eigen::VectorXd x(dims());
    for (int a = 0; a < dims(); ++a) x[a] = coord(k, a);
    return x;
}

double PhaseGrid::weight(std::size_t k) const {
    double w = 1.0;
    for (int a = 0; a < dims(); ++a) w *= axis(a).weight(index_along(k, a));
    return w;
}

bool PhaseGrid::same_shape(const PhaseGrid& other) const {
    if (dims() != other.dims()) return false;
    for (int a = 0; a < dims(); ++a) {
        const auto& x = axis(a);
        const auto& y = other.axis(a);
        if (x.nodes != y.nodes || x.min != y.min || x.max != y.max || x.boundary != y.boundary) return false;
    }
    return true;
}

Eigen::MatrixXd spectral_diff_matrix(int n, double length) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    const double scale = 2.0 * std::numbers::pi / length;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            const int m = j - k;
            const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            const double t = m * std::numbers::pi / n;
            const double v = (n % 2 == 0) ? 1.0 / std::tan(t) : 1.0 / std::sin(t);
            d(j, k) = 0.5 * sgn * v * scale;
        }
    }
    return d;
}

void differentiate(const PhaseGrid& grid, int axis, DiffScheme scheme, const std::complex<double>* in,
                   std::complex<double>* out, std::size_t comp) {
    const GridAxis& ax = grid.axis(axis);
    const int n = ax.nodes;
    const double h = ax.spacing();
    const std::size_t stride = grid.stride(axis) * comp;
    const std::size_t lines = grid.size() / static_cast<std::size_t>(n);
    const std::size_t inner = grid.stride(axis);

    Eigen::MatrixXd dmat;
    if (scheme == DiffScheme::Spectral) {
        if (ax.boundary != Boundary::Periodic) {
            throw UnsupportedError("spectral differentiation needs a periodic axis ('" + ax.name + "')");
        }
        dmat = spectral_diff_matrix(n, ax.max - ax.min);
    }
    const bool periodic = ax.boundary == Boundary::Periodic;

#pragma omp parallel for schedule(static)
    for (std::size_t line = 0; line < lines; ++line) {
        const std::size_t outer = line / inner;
        const std::size_t base = (outer * static_cast<std::size_t>(n) * inner + line % inner) * comp;
        for (std::size_t c = 0; c < comp; ++c) {
            auto f = [&](int i) { return in[base + static_cast<std::size_t>(i) * stride + c]; };
            for (int i = 0; i < n; ++i) {
                std::complex<double> v;
                if (scheme == DiffScheme::Spectral) {
                    for (int k = 0; k < n; ++k) {
                        if (dmat(i, k) != 0.0) v += dmat(i, k) * f(k);
                    }
                } else if (periodic) {
                    auto w = [&](int j) { return f(((j % n) + n) % n); };
                    v = (w(i - 2) - 8.0 * w(i - 1) + 8.0 * w(i + 1) - w(i + 2)) / (12.0 * h);
                } else if (i >= 2 && i <= n - 3) {
                    v = (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
                } else if (i == 0) {
                    v = (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h);
                } else if (i == 1) {
                    v = (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h);
                } else if (i == n - 2) {
                    v = (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) + 6.0 * f(n - 4) - f(n - 5)) / (12.0 * h);
                } else {
                    v = (25.0 * f(n - 1) - 48.0 * f(n - 2) + 36.0 * f(n - 3) - 16.0 * f(n - 4) + 3.0 * f(n - 5)) /
                        (12.0 * h);
                }
                out[base + static_cast<std::size_t>(i) * stride + c] = v;
            }
        }
    }
}

}  // namespace nhbrack
