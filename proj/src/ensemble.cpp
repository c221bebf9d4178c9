// ensemble.cpp: thermostat and barostat bracket structures and their energies.
#include "nhbrack/ensemble.hpp"

#include "nhbrack/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace nhbrack {

void EnsembleSpec::validate() const {
    if (n_phys < 1) throw std::invalid_argument("ensemble needs n_phys >= 1");
    if (!(temperature > 0.0) || !(k_b > 0.0)) throw std::invalid_argument("temperature and k_b must be > 0");
    if (!(g_eff() > 0.0)) throw std::invalid_argument("g must be > 0");
    for (double m : {mass, m_eta, m_eta1, m_eta2, m_v}) {
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("masses must be finite and > 0");
    }
    if (!std::isfinite(p_ext)) throw std::invalid_argument("p_ext must be finite");
}

Potential Potential::zero() {
    return {"zero", [](const Eigen::VectorXd&) { return 0.0; },
            [](const Eigen::VectorXd& r) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(r.size()); }};
}

Potential Potential::harmonic(double k) {
    return {"harmonic", [k](const Eigen::VectorXd& r) { return 0.5 * k * r.squaredNorm(); },
            [k](const Eigen::VectorXd& r) -> Eigen::VectorXd { return k * r; }};
}

Potential Potential::quartic(double k, double lambda) {
    return {"quartic",
            [k, lambda](const Eigen::VectorXd& r) {
                return 0.5 * k * r.squaredNorm() + lambda * r.array().pow(4).sum();
            },
            [k, lambda](const Eigen::VectorXd& r) -> Eigen::VectorXd {
                return (k * r.array() + 4.0 * lambda * r.array().cube()).matrix();
            }};
}

BracketStructure make_structure(const EnsembleSpec& spec) {
    spec.validate();
    const LayoutIndex ix = spec.index();
    const int n = spec.n_phys;
    const int d = ix.dim();
    const int c = ix.coordinate_count();
    const bool coupled = !spec.decouple_thermostat;

    // Canonical pairs (q_i, p_i) for every coordinate.
    auto canonical = [d, c]() {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < c; ++i) {
            b(i, c + i) = 1.0;
            b(c + i, i) = -1.0;
        }
        return b;
    };

    switch (spec.kind) {
        case Layout::NVE:
            return BracketStructure::symplectic(n);
        case Layout::Nose: {
            MatrixFn bf = [=](const Eigen::VectorXd& x) {
                Eigen::MatrixXd b = canonical();
                if (coupled) {
                    for (int k = 0; k < n; ++k) {
                        b(ix.p(k), ix.p_eta()) = -x[ix.p(k)];
                        b(ix.p_eta(), ix.p(k)) = x[ix.p(k)];
                    }
                }
                return b;
            };
            VectorFn div = [=](const Eigen::VectorXd&) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
                if (coupled) v[ix.p_eta()] = -n;
                return v;
            };
            return BracketStructure(d, bf, div, "nose");
        }
        case Layout::NHC2: {
            MatrixFn bf = [=](const Eigen::VectorXd& x) {
                Eigen::MatrixXd b = canonical();
                if (coupled) {
                    for (int k = 0; k < n; ++k) {
                        b(ix.p(k), ix.p_eta(0)) = -x[ix.p(k)];
                        b(ix.p_eta(0), ix.p(k)) = x[ix.p(k)];
                    }
                    b(ix.p_eta(0), ix.p_eta(1)) = -x[ix.p_eta(0)];
                    b(ix.p_eta(1), ix.p_eta(0)) = x[ix.p_eta(0)];
                }
                return b;
            };
            VectorFn div = [=](const Eigen::VectorXd&) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
                if (coupled) {
                    v[ix.p_eta(0)] = -n;
                    v[ix.p_eta(1)] = -1.0;
                }
                return v;
            };
            return BracketStructure(d, bf, div, "nhc2");
        }
        case Layout::NPT: {
            MatrixFn bf = [=](const Eigen::VectorXd& x) {
                Eigen::MatrixXd b = canonical();
                const double v3 = 3.0 * x[ix.volume()];
                const int pv = ix.p_volume();
                for (int k = 0; k < n; ++k) {
                    b(ix.r(k), pv) = x[ix.r(k)] / v3;
                    b(pv, ix.r(k)) = -x[ix.r(k)] / v3;
                    b(ix.p(k), pv) = -x[ix.p(k)] / v3;
                    b(pv, ix.p(k)) = x[ix.p(k)] / v3;
                    if (coupled) {
                        b(ix.p(k), ix.p_eta()) = -x[ix.p(k)];
                        b(ix.p_eta(), ix.p(k)) = x[ix.p(k)];
                    }
                }
                if (coupled) {
                    b(ix.p_eta(), pv) = x[pv];
                    b(pv, ix.p_eta()) = -x[pv];
                }
                return b;
            };
            // The R/3V and -P/3V entries of the p_V column cancel in the divergence.
            VectorFn div = [=](const Eigen::VectorXd&) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
                if (coupled) v[ix.p_eta()] = -(n + 1.0);
                return v;
            };
            return BracketStructure(d, bf, div, "npt");
        }
    }
    throw std::invalid_argument("unknown ensemble kind");
}

GeneralizedEnergy make_energy(const EnsembleSpec& spec, const Potential& phi) {
    spec.validate();
    const LayoutIndex ix = spec.index();
    const int n = spec.n_phys;
    const double gkt = spec.decouple_thermostat ? 0.0 : spec.g_eff() * spec.kT();

    GeneralizedEnergy h;
    h.beta = spec.beta();
    h.g = spec.g_eff();
    h.mass = spec.mass;
    h.m_eta = spec.m_eta;
    h.m_eta1 = spec.m_eta1;
    h.m_eta2 = spec.m_eta2;
    h.m_v = spec.m_v;
    h.p_ext = spec.p_ext;

    h.value = [=](const Eigen::VectorXd& x) {
        if (x.size() != ix.dim()) throw StructuralError("energy evaluated at wrong dimension");
        const Eigen::VectorXd r = x.segment(ix.r(0), n);
        double e = x.segment(ix.p(0), n).squaredNorm() / (2.0 * spec.mass) + phi.value(r);
        switch (spec.kind) {
            case Layout::NVE: break;
            case Layout::Nose:
                e += x[ix.p_eta()] * x[ix.p_eta()] / (2.0 * spec.m_eta) + gkt * x[ix.eta()];
                break;
            case Layout::NHC2:
                e += x[ix.p_eta(0)] * x[ix.p_eta(0)] / (2.0 * spec.m_eta1) +
                     x[ix.p_eta(1)] * x[ix.p_eta(1)] / (2.0 * spec.m_eta2) + gkt * (x[ix.eta(0)] + x[ix.eta(1)]);
                break;
            case Layout::NPT:
                e += x[ix.p_eta()] * x[ix.p_eta()] / (2.0 * spec.m_eta) +
                     x[ix.p_volume()] * x[ix.p_volume()] / (2.0 * spec.m_v) + gkt * x[ix.eta()] +
                     spec.p_ext * x[ix.volume()];
                break;
        }
        return e;
    };
    h.gradient = [=](const Eigen::VectorXd& x) {
        if (x.size() != ix.dim()) throw StructuralError("energy gradient evaluated at wrong dimension");
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
        g.segment(ix.r(0), n) = phi.gradient(x.segment(ix.r(0), n));
        g.segment(ix.p(0), n) = x.segment(ix.p(0), n) / spec.mass;
        switch (spec.kind) {
            case Layout::NVE: break;
            case Layout::Nose:
                g[ix.eta()] = gkt;
                g[ix.p_eta()] = x[ix.p_eta()] / spec.m_eta;
                break;
            case Layout::NHC2:
                g[ix.eta(0)] = gkt;
                g[ix.eta(1)] = gkt;
                g[ix.p_eta(0)] = x[ix.p_eta(0)] / spec.m_eta1;
                g[ix.p_eta(1)] = x[ix.p_eta(1)] / spec.m_eta2;
                break;
            case Layout::NPT:
                g[ix.eta()] = gkt;
                g[ix.volume()] = spec.p_ext;
                g[ix.p_eta()] = x[ix.p_eta()] / spec.m_eta;
                g[ix.p_volume()] = x[ix.p_volume()] / spec.m_v;
                break;
        }
        return g;
    };
    return h;
}

double kappa_closed_form(const EnsembleSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (spec.decouple_thermostat) return 0.0;
    const LayoutIndex ix = spec.index();
    const double n = spec.n_phys;
    switch (spec.kind) {
        case Layout::NVE: return 0.0;
        case Layout::Nose: return -n * x[ix.p_eta()] / spec.m_eta;
        case Layout::NHC2: return -n * x[ix.p_eta(0)] / spec.m_eta1 - x[ix.p_eta(1)] / spec.m_eta2;
        case Layout::NPT: return -(n + 1.0) * x[ix.p_eta()] / spec.m_eta;
    }
    return 0.0;
}

double phase_weight(const EnsembleSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (spec.decouple_thermostat) return 0.0;
    const LayoutIndex ix = spec.index();
    const double n = spec.n_phys;
    switch (spec.kind) {
        case Layout::NVE: return 0.0;
        case Layout::Nose: return -n * x[ix.eta()];
        case Layout::NHC2: return -n * x[ix.eta(0)] - x[ix.eta(1)];
        case Layout::NPT: return -(n + 1.0) * x[ix.eta()];
    }
    return 0.0;
}

void flow_velocity(const EnsembleSpec& spec, const double* x, const double* force, double* out) {
    const LayoutIndex ix = spec.index();
    const int n = spec.n_phys;
    const bool coupled = !spec.decouple_thermostat;
    const double gkt = coupled ? spec.g_eff() * spec.kT() : 0.0;
    double p2m = 0.0;
    for (int k = 0; k < n; ++k) p2m += x[ix.p(k)] * x[ix.p(k)] / spec.mass;

    switch (spec.kind) {
        case Layout::NVE:
            for (int k = 0; k < n; ++k) {
                out[ix.r(k)] = x[ix.p(k)] / spec.mass;
                out[ix.p(k)] = force[k];
            }
            return;
        case Layout::Nose: {
            const double xi = coupled ? x[ix.p_eta()] / spec.m_eta : 0.0;
            for (int k = 0; k < n; ++k) {
                out[ix.r(k)] = x[ix.p(k)] / spec.mass;
                out[ix.p(k)] = force[k] - x[ix.p(k)] * xi;
            }
            out[ix.eta()] = x[ix.p_eta()] / spec.m_eta;
            out[ix.p_eta()] = coupled ? p2m - gkt : 0.0;
            return;
        }
        case Layout::NHC2: {
            const double xi1 = x[ix.p_eta(0)] / spec.m_eta1;
            const double xi2 = x[ix.p_eta(1)] / spec.m_eta2;
            for (int k = 0; k < n; ++k) {
                out[ix.r(k)] = x[ix.p(k)] / spec.mass;
                out[ix.p(k)] = force[k] - (coupled ? x[ix.p(k)] * xi1 : 0.0);
            }
            out[ix.eta(0)] = xi1;
            out[ix.eta(1)] = xi2;
            if (coupled) {
                out[ix.p_eta(0)] = p2m - gkt - x[ix.p_eta(0)] * xi2;
                out[ix.p_eta(1)] = x[ix.p_eta(0)] * xi1 - gkt;
            } else {
                out[ix.p_eta(0)] = 0.0;
                out[ix.p_eta(1)] = 0.0;
            }
            return;
        }
        case Layout::NPT: {
            const double vol = x[ix.volume()];
            const double pv = x[ix.p_volume()];
            const double eps = pv / (3.0 * vol * spec.m_v);
            const double xi = coupled ? x[ix.p_eta()] / spec.m_eta : 0.0;
            double virial = 0.0;  // -dPhi/dR . R
            for (int k = 0; k < n; ++k) virial += force[k] * x[ix.r(k)];
            for (int k = 0; k < n; ++k) {
                out[ix.r(k)] = x[ix.p(k)] / spec.mass + x[ix.r(k)] * eps;
                out[ix.p(k)] = force[k] - x[ix.p(k)] * eps - x[ix.p(k)] * xi;
            }
            out[ix.eta()] = x[ix.p_eta()] / spec.m_eta;
            out[ix.volume()] = pv / spec.m_v;
            out[ix.p_eta()] = coupled ? p2m + pv * pv / spec.m_v - gkt : 0.0;
            const double f_v = (p2m + virial) / (3.0 * vol) - spec.p_ext;
            out[ix.p_volume()] = f_v - pv * xi;
            return;
        }
    }
}

}  // namespace nhbrack
