// adiabatic.cpp: adiabatic energies, nonadiabatic couplings and surface potentials.
#include "nhbrack/adiabatic.hpp"

#include "nhbrack/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace nhbrack {

namespace {

void check_n(int n) {
    if (n < 1) throw std::invalid_argument("model needs n >= 1");
}

}  // namespace

QuantumModel QuantumModel::linear_vibronic(int n, double a, double delta, double k) {
    check_n(n);
    auto slope = [n](int i) { return static_cast<double>((n - 1) - 2 * i); };
    QuantumModel m;
    m.kind = "linear_vibronic";
    m.n = n;
    m.h_at = [=](double r) {
        Eigen::MatrixXd h = 0.5 * k * r * r * Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) {
            h(i, i) += a * r * slope(i);
            if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = delta;
        }
        return h;
    };
    m.dh_at = [=](double r) {
        Eigen::MatrixXd h = k * r * Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) h(i, i) += a * slope(i);
        return h;
    };
    return m;
}

QuantumModel QuantumModel::spin_boson(double epsilon, double a, double delta, double k) {
    QuantumModel m;
    m.kind = "spin_boson";
    m.n = 2;
    m.h_at = [=](double r) {
        Eigen::Matrix2d h;
        h << epsilon + a * r, delta, delta, -(epsilon + a * r);
        return Eigen::MatrixXd(h + 0.5 * k * r * r * Eigen::Matrix2d::Identity());
    };
    m.dh_at = [=](double r) {
        Eigen::Matrix2d h;
        h << a, 0.0, 0.0, -a;
        return Eigen::MatrixXd(h + k * r * Eigen::Matrix2d::Identity());
    };
    return m;
}

QuantumModel QuantumModel::diagonal(int n, double a, double delta, double k) {
    check_n(n);
    QuantumModel m;
    m.kind = "diagonal";
    m.n = n;
    m.h_at = [=](double r) {
        Eigen::MatrixXd h = 0.5 * k * r * r * Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) h(i, i) += ((n - 1) - 2 * i) * (delta + 0.5 * a * r * r);
        return h;
    };
    m.dh_at = [=](double r) {
        Eigen::MatrixXd h = k * r * Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i) h(i, i) += ((n - 1) - 2 * i) * a * r;
        return h;
    };
    return m;
}

AdiabaticFrame adiabatize(const QuantumModel& m, double R, double hbar, const AdiabaticFrame* neighbor) {
    if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be > 0");
    const Eigen::MatrixXd h = m.h_at(R);
    const Eigen::MatrixXd dh = m.dh_at(R);
    if (h.rows() != m.n || h.cols() != m.n || dh.rows() != m.n || dh.cols() != m.n) {
        throw StructuralError("model matrices have the wrong size");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

    AdiabaticFrame f;
    f.R = R;
    f.E = es.eigenvalues();
    f.U = es.eigenvectors();
    const int n = m.n;
    for (int a = 0; a + 1 < n; ++a) {
        const double gap = f.E[a + 1] - f.E[a];
        if (gap < kDegeneracyTolerance) {
            throw DegeneracyError("adiabatic energies degenerate at R = " + std::to_string(R), R, gap);
        }
    }
    for (int a = 0; a < n; ++a) {
        double ref;
        if (neighbor) {
            ref = f.U.col(a).dot(neighbor->U.col(a));
        } else {
            Eigen::Index imax;
            f.U.col(a).cwiseAbs().maxCoeff(&imax);
            ref = f.U(imax, a);
        }
        if (ref < 0.0) f.U.col(a) *= -1.0;
    }
    const Eigen::MatrixXd g = f.U.transpose() * dh * f.U;
    f.F_full = -g;
    f.F_diag = -g.diagonal();
    f.d = Eigen::MatrixXd::Zero(n, n);
    f.omega.resize(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            f.omega(a, b) = (f.E[a] - f.E[b]) / hbar;
            if (a != b) f.d(a, b) = g(a, b) / (f.E[b] - f.E[a]);
        }
    }
    return f;
}

std::vector<AdiabaticFrame> adiabatize_along(const QuantumModel& m, const std::vector<double>& Rs, double hbar) {
    std::vector<AdiabaticFrame> out;
    out.reserve(Rs.size());
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        out.push_back(adiabatize(m, Rs[i], hbar, i ? &out.back() : nullptr));
    }
    return out;
}

Eigen::MatrixXd offdiagonal_force_identity(const AdiabaticFrame& frame) {
    const int n = frame.n();
    Eigen::MatrixXd r(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            r(a, b) = frame.F_full(a, b) - (a == b ? frame.F_diag[a] : 0.0) - (frame.E[a] - frame.E[b]) * frame.d(a, b);
        }
    }
    return r;
}

Potential surface_potential(const QuantumModel& m, int alpha) {
    if (alpha < 0 || alpha >= m.n) throw std::invalid_argument("surface index out of range");
    auto energy = [m, alpha](const Eigen::VectorXd& r) {
        if (r.size() != 1) throw StructuralError("adiabatic surfaces are defined on one classical coordinate");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.h_at(r[0]), Eigen::EigenvaluesOnly);
        return es.eigenvalues()[alpha];
    };
    auto gradient = [m, alpha](const Eigen::VectorXd& r) -> Eigen::VectorXd {
        if (r.size() != 1) throw StructuralError("adiabatic surfaces are defined on one classical coordinate");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.h_at(r[0]));
        const Eigen::VectorXd u = es.eigenvectors().col(alpha);
        return Eigen::VectorXd::Constant(1, u.dot(m.dh_at(r[0]) * u));
    };
    return {m.kind + "_surface_" + std::to_string(alpha), energy, gradient};
}

}  // namespace nhbrack
