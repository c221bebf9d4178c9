// adiabatic.hpp: quantum subsystem models and adiabatic frames along one
// classical coordinate R.
#pragma once

#include "nhbrack/ensemble.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace nhbrack {

// Real symmetric h(R) = K + Phi(R); the classical confining term k R^2 / 2
// is part of Phi so that surfaces and forces include it.
struct QuantumModel {
    std::string kind;
    int n{2};
    std::function<Eigen::MatrixXd(double)> h_at;
    std::function<Eigen::MatrixXd(double)> dh_at;

    // Diagonal a R ((n-1) - 2i), nearest-neighbour coupling delta.
    // For n = 2 this is a R sigma_z + delta sigma_x.
    static QuantumModel linear_vibronic(int n, double a, double delta, double k);
    // (epsilon + a R) sigma_z + delta sigma_x.
    static QuantumModel spin_boson(double epsilon, double a, double delta, double k);
    // Uncoupled surfaces s_i (delta + a R^2 / 2) with s_i = (n-1) - 2i; d == 0.
    static QuantumModel diagonal(int n, double a, double delta, double k);
};

struct AdiabaticFrame {
    double R{0.0};
    Eigen::VectorXd E;        // ascending
    Eigen::MatrixXd U;        // eigenvector columns
    Eigen::MatrixXd d;        // <alpha|d/dR|beta>
    Eigen::VectorXd F_diag;   // -<alpha|dPhi/dR|alpha>
    Eigen::MatrixXd F_full;   // -<alpha|dPhi/dR|beta>
    Eigen::MatrixXd omega;    // (E_alpha - E_beta) / hbar

    int n() const { return static_cast<int>(E.size()); }
};

inline constexpr double kDegeneracyTolerance = 1e-10;

// Eigendecomposition with each column's largest-magnitude entry positive, or
// with sign continuity against `neighbor` when given.
AdiabaticFrame adiabatize(const QuantumModel& m, double R, double hbar = 1.0,
                          const AdiabaticFrame* neighbor = nullptr);
// Sequential sweep with sign continuity between consecutive points.
std::vector<AdiabaticFrame> adiabatize_along(const QuantumModel& m, const std::vector<double>& Rs,
                                             double hbar = 1.0);

// F^{ab} - F^a delta_ab - (E_a - E_b) d_ab.
Eigen::MatrixXd offdiagonal_force_identity(const AdiabaticFrame& frame);

// Adiabatic surface E_alpha(R) as a classical potential on one coordinate.
Potential surface_potential(const QuantumModel& m, int alpha);

}  // namespace nhbrack
