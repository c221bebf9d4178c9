// bracket.hpp: antisymmetric matrix brackets, flows and compressibility.
#pragma once

#include "nhbrack/phase_point.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace nhbrack {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Central-difference step used by every numeric fallback: 1e-5 * (1 + |x_i|).
double fd_step(double xi);

// Real phase-space function with an optional analytic gradient.
struct ScalarField {
    ScalarFn value;
    VectorFn gradient;  // empty -> central differences

    double operator()(const Eigen::VectorXd& x) const { return value(x); }
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const;

    static ScalarField coordinate(int i);
    static ScalarField constant(double c);
};

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x);

class BracketStructure {
public:
    BracketStructure(int dim, MatrixFn b, VectorFn div = {}, std::string name = "custom");

    // Canonical 2n x 2n structure [[0, I], [-I, 0]].
    static BracketStructure symplectic(int n);

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    bool has_analytic_divergence() const { return static_cast<bool>(div_); }

    Eigen::MatrixXd matrix(const Eigen::VectorXd& x) const;
    // Column divergences sum_i dB_ij/dX_i; analytic when available.
    Eigen::VectorXd divergence(const Eigen::VectorXd& x) const;
    Eigen::VectorXd divergence_fd(const Eigen::VectorXd& x) const;

private:
    int dim_;
    MatrixFn b_;
    VectorFn div_;
    std::string name_;
};

// Generalized energy with analytic gradient and the thermodynamic
// parameters needed by the extended-system forms.
struct GeneralizedEnergy {
    ScalarFn value;
    VectorFn gradient;
    double beta{1.0};
    double g{1.0};
    double mass{1.0};
    double m_eta{1.0};
    double m_eta1{1.0};
    double m_eta2{1.0};
    double m_v{1.0};
    double p_ext{0.0};

    double operator()(const Eigen::VectorXd& x) const { return value(x); }
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const { return gradient(x); }
    ScalarField as_field() const { return {value, gradient}; }
};

double poisson_bracket(const ScalarField& a, const ScalarField& b, const BracketStructure& s,
                       const Eigen::VectorXd& x);
inline double poisson_bracket(const ScalarField& a, const ScalarField& b, const BracketStructure& s,
                              const PhasePoint& x) {
    return poisson_bracket(a, b, s, x.coords());
}

Eigen::VectorXd eom_rhs(const BracketStructure& s, const GeneralizedEnergy& h, const Eigen::VectorXd& x);
inline Eigen::VectorXd eom_rhs(const BracketStructure& s, const GeneralizedEnergy& h, const PhasePoint& x) {
    return eom_rhs(s, h, x.coords());
}

// kappa = sum_ij dB_ij/dX_i dH/dX_j.
double compressibility(const BracketStructure& s, const GeneralizedEnergy& h, const Eigen::VectorXd& x);
inline double compressibility(const BracketStructure& s, const GeneralizedEnergy& h, const PhasePoint& x) {
    return compressibility(s, h, x.coords());
}

// Rate dw/dt of the measure exponent; the invariant measure is exp(-w) dX.
inline double invariant_weight_rate(const BracketStructure& s, const GeneralizedEnergy& h,
                                    const Eigen::VectorXd& x) {
    return compressibility(s, h, x);
}

// {a,{b,c}} + {c,{a,b}} + {b,{c,a}}; inner brackets use the fields' gradients,
// outer gradients are central differences with step `outer_step * (1 + |x_i|)`.
double jacobi_residual_classical(const BracketStructure& s, const ScalarField& a, const ScalarField& b,
                                 const ScalarField& c, const Eigen::VectorXd& x, double outer_step = 1e-4);

}  // namespace nhbrack
