// ensemble.hpp: Nose, Nose-Hoover chain and NPT extended systems.
#pragma once

#include "nhbrack/bracket.hpp"
#include "nhbrack/phase_point.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>

namespace nhbrack {

struct EnsembleSpec {
    Layout kind{Layout::Nose};
    int n_phys{1};
    double temperature{1.0};
    double k_b{1.0};
    std::optional<double> g;  // defaults to n_phys
    double mass{1.0};
    double m_eta{1.0};
    double m_eta1{1.0};
    double m_eta2{1.0};
    double m_v{1.0};
    double p_ext{0.0};
    // Removes the thermostat couplings from B and the g k_B T eta terms from H,
    // leaving the physical subsystem with free, uncoupled thermostat variables.
    bool decouple_thermostat{false};

    double kT() const { return k_b * temperature; }
    double beta() const { return 1.0 / kT(); }
    double g_eff() const { return g.value_or(static_cast<double>(n_phys)); }
    LayoutIndex index() const { return {kind, n_phys}; }
    int dim() const { return index().dim(); }
    void validate() const;
};

// Physical potential Phi(R) on the n_phys classical coordinates.
struct Potential {
    std::string name;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;

    static Potential zero();
    static Potential harmonic(double k);
    // k R^2 / 2 + lambda R^4 per coordinate.
    static Potential quartic(double k, double lambda);
};

BracketStructure make_structure(const EnsembleSpec& spec);
GeneralizedEnergy make_energy(const EnsembleSpec& spec, const Potential& phi);

// Closed forms used to cross-check the divergence-based values.
double kappa_closed_form(const EnsembleSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);
// Measure exponent w(X) with dw/dt = kappa along the flow (w = 0 at eta = 0).
double phase_weight(const EnsembleSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

// B(X) grad H written out per layout, given the physical force -dPhi/dR.
// x, force and out are raw arrays of length dim and n_phys.
void flow_velocity(const EnsembleSpec& spec, const double* x, const double* force, double* out);

}  // namespace nhbrack
