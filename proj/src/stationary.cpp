// stationary.cpp: stationary densities, order-hbar corrections, Fredholm and marginal checks.
#include "nhbrack/stationary.hpp"

#include "nhbrack/errors.hpp"
#include "nhbrack/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nhbrack {

namespace {

const cplx I{0.0, 1.0};

// E_a(R) at node k plus the extended-energy terms without a potential.
struct SurfaceEnergy {
    const FrameField& frames;
    const PhaseGrid& grid;
    GeneralizedEnergy ext;
    int r_axis{0};

    SurfaceEnergy(const FrameField& f, const PhaseGrid& g, const EnsembleSpec& spec)
        : frames(f), grid(g), ext(make_energy(spec, Potential::zero())) {
        if (f.frames.size() != static_cast<std::size_t>(g.axis(0).nodes)) {
            throw StructuralError("adiabatic frames do not cover the R axis");
        }
    }
    const AdiabaticFrame& frame(std::size_t k) const {
        return frames.frames[static_cast<std::size_t>(grid.index_along(k, r_axis))];
    }
    double operator()(std::size_t k, int a, const Eigen::VectorXd& x) const { return frame(k).E[a] + ext.value(x); }
};

void check_layout(const EnsembleSpec& spec, const PhaseGrid& grid) {
    if (grid.dims() != spec.dim()) throw StructuralError("grid does not match the ensemble layout");
}

}  // namespace

void StationarySpec::validate() const {
    ensemble.validate();
    if (!(sigma_E > 0.0)) throw std::invalid_argument("sigma_E must be > 0");
    if (order != 0 && order != 1) throw std::invalid_argument("order must be 0 or 1");
    if (weight_sign != 1 && weight_sign != -1) throw std::invalid_argument("weight_sign must be +1 or -1");
    if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be > 0");
    if (form == StationaryForm::DeltaShell && ensemble.kind != Layout::Nose) {
        throw std::invalid_argument("the delta-shell form is defined for the Nose layout");
    }
}

DensityField stationary_rho0(const StationarySpec& spec, const FrameField& frames,
                             std::shared_ptr<const PhaseGrid> grid) {
    spec.validate();
    check_layout(spec.ensemble, *grid);
    const int n = frames.n();
    DensityField rho(grid, n);
    const SurfaceEnergy energy(frames, *grid, spec.ensemble);
    const double beta = spec.ensemble.beta();
    const double s = spec.weight_sign;
    const bool shell = spec.form == StationaryForm::DeltaShell;
    const double norm = 1.0 / (spec.sigma_E * std::sqrt(2.0 * std::numbers::pi));

    std::vector<double> hmin(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<double> hmax(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
    // Exponents are shifted by their maximum before exponentiation.
    std::vector<double> expo(grid->size() * static_cast<std::size_t>(n));
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid->size(); ++k) {
        const Eigen::VectorXd x = grid->point(k);
        const double w = phase_weight(spec.ensemble, x);
        for (int a = 0; a < n; ++a) {
            const double h = energy(k, a, x);
            hmin[static_cast<std::size_t>(a)] = std::min(hmin[static_cast<std::size_t>(a)], h);
            hmax[static_cast<std::size_t>(a)] = std::max(hmax[static_cast<std::size_t>(a)], h);
            double e = s * w;
            if (shell) {
                const double u = (spec.C - h) / spec.sigma_E;
                e += -0.5 * u * u;
            } else {
                e += -beta * h;
            }
            expo[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] = e;
            top = std::max(top, e);
        }
    }
    if (shell) {
        for (int a = 0; a < n; ++a) {
            if (hmin[static_cast<std::size_t>(a)] > spec.C - 6.0 * spec.sigma_E ||
                hmax[static_cast<std::size_t>(a)] < spec.C + 6.0 * spec.sigma_E) {
                throw DomainError("grid energies [" + std::to_string(hmin[static_cast<std::size_t>(a)]) + ", " +
                                  std::to_string(hmax[static_cast<std::size_t>(a)]) + "] on surface " +
                                  std::to_string(a) + " do not cover the shell C +- 6 sigma_E");
            }
        }
    }
    for (std::size_t k = 0; k < grid->size(); ++k) {
        for (int a = 0; a < n; ++a) {
            rho.at(k, a, a) = norm * std::exp(expo[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] - top);
        }
    }
    rho.normalize();
    return rho;
}

double rho1_bracket_factor(double x, double beta) {
    const double y = beta * x;
    if (std::abs(x) < 1e-4 && std::abs(y) < 1.0) {
        // beta * sum_{m>=2} (-1)^m (m-1) / (2 (m+1)!) y^m
        double sum = 0.0;
        double pw = y * y;      // y^m
        double fact = 6.0;      // (m+1)!
        for (int m = 2; m < 40; ++m) {
            const double term = ((m % 2 == 0) ? 1.0 : -1.0) * (m - 1) / (2.0 * fact) * pw;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
            pw *= y;
            fact *= (m + 2);
        }
        return beta * sum;
    }
    const double e = std::exp(-y);
    return (1.0 - e) / (-x) + 0.5 * beta * (1.0 + e);
}

DensityField stationary_rho1(const DensityField& rho0, const FrameField& frames, const EnsembleSpec& spec) {
    check_layout(spec, rho0.grid());
    const PhaseGrid& grid = rho0.grid();
    const int n = rho0.n();
    if (frames.n() != n) throw StructuralError("frames and density have different quantum dimensions");
    if (frames.frames.size() != static_cast<std::size_t>(grid.axis(0).nodes)) {
        throw StructuralError("adiabatic frames do not cover the R axis");
    }
    const int p_axis = spec.index().p(0);
    const double beta = spec.beta();
    DensityField rho1(rho0.grid_ptr(), n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const AdiabaticFrame& f = frames.frames[static_cast<std::size_t>(grid.index_along(k, 0))];
        const double pm = grid.coord(k, p_axis) / spec.mass;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                const double x = f.E[a] - f.E[b];
                if (std::abs(x) < kDegeneracyTolerance) {
                    throw DegeneracyError("degenerate energies in the order-hbar term", f.R, std::abs(x));
                }
                rho1.at(k, a, b) = -I * pm * f.d(a, b) * rho0.at(k, b, b) * rho1_bracket_factor(x, beta);
            }
        }
    }
    return rho1;
}

DensityField rho1_from_recursion(const DensityField& rho0, const LiouvillianOp& op) {
    DensityField j(rho0.grid_ptr(), rho0.n());
    op.apply_jump(rho0, j);
    DensityField rho1(rho0.grid_ptr(), rho0.n());
    const int n = rho0.n();
    for (std::size_t k = 0; k < rho0.nodes(); ++k) {
        const AdiabaticFrame& f = op.frame_at(k);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                const double x = f.E[a] - f.E[b];
                if (std::abs(x) < kDegeneracyTolerance) {
                    throw DegeneracyError("degenerate energies in the order-hbar recursion", f.R, std::abs(x));
                }
                rho1.at(k, a, b) = -I * j.at(k, a, b) / x;
            }
        }
    }
    return rho1;
}

double stationarity_residual(const DensityField& rho, const LiouvillianOp& op) {
    if (op.side() != Side::Density) throw std::invalid_argument("stationarity residual needs a density-side operator");
    return op.relative_rate_norm(rho);
}

FredholmResult fredholm_check(const DensityField& rho_offdiag, const LiouvillianOp& op) {
    const int n = rho_offdiag.n();
    DensityField j(rho_offdiag.grid_ptr(), n);
    op.apply_jump(rho_offdiag, j);
    const PhaseGrid& grid = rho_offdiag.grid();
    const std::vector<double> mu = rho_offdiag.measure_weights(op.spec());
    FredholmResult res;
    res.values.assign(static_cast<std::size_t>(n), std::vector<double>(3, 0.0));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.weight(k) * mu[k];
        for (int a = 0; a < n; ++a) {
            const double h = op.surface_energy(k, a);
            const double v = j.at(k, a, a).real() * w;
            auto& row = res.values[static_cast<std::size_t>(a)];
            row[0] += v;
            row[1] += v * h;
            row[2] += v * h * h;
        }
    }
    for (const auto& row : res.values) {
        for (double v : row) res.max_abs = std::max(res.max_abs, std::abs(v));
    }
    return res;
}

DensityField parity_violating_control(const DensityField& rho0, const EnsembleSpec& spec, double amplitude) {
    DensityField out = rho0;
    const int p_axis = spec.index().p(0);
    const int n = rho0.n();
    for (std::size_t k = 0; k < rho0.nodes(); ++k) {
        const double pm = rho0.grid().coord(k, p_axis) / spec.mass;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                out.at(k, a, b) = a == b ? cplx{} : amplitude * pm * 0.5 * (rho0.at(k, a, a) + rho0.at(k, b, b));
            }
        }
    }
    return out;
}

MarginalResult marginalize_nose(const DensityField& rho0, const FrameField& frames, const EnsembleSpec& spec) {
    if (spec.kind != Layout::Nose) throw std::invalid_argument("marginalization needs the Nose layout");
    check_layout(spec, rho0.grid());
    const PhaseGrid& g = rho0.grid();
    const LayoutIndex ix = spec.index();
    const int ar = ix.r(0), ae = ix.eta(), ap = ix.p(0), ape = ix.p_eta();
    const GridAxis &rax = g.axis(ar), &eax = g.axis(ae), &pax = g.axis(ap), &peax = g.axis(ape);
    if (frames.frames.size() != static_cast<std::size_t>(rax.nodes)) {
        throw StructuralError("adiabatic frames do not cover the R axis");
    }

    MarginalResult m;
    m.n = rho0.n();
    m.r_nodes = rax.nodes;
    m.p_nodes = pax.nodes;
    const std::size_t plane = static_cast<std::size_t>(rax.nodes * pax.nodes);
    m.reduced.assign(static_cast<std::size_t>(m.n) * plane, 0.0);
    m.h_t.assign(m.reduced.size(), 0.0);
    m.expected_slope = -spec.beta() * spec.n_phys / spec.g_eff();

    for (int a = 0; a < m.n; ++a) {
        for (int i = 0; i < rax.nodes; ++i) {
            for (int j = 0; j < pax.nodes; ++j) {
                double total = 0.0;
                for (int q = 0; q < peax.nodes; ++q) {
                    double line = 0.0, edge = 0.0;
                    for (int e = 0; e < eax.nodes; ++e) {
                        const std::size_t k = static_cast<std::size_t>(i) * g.stride(ar) +
                                              static_cast<std::size_t>(e) * g.stride(ae) +
                                              static_cast<std::size_t>(j) * g.stride(ap) +
                                              static_cast<std::size_t>(q) * g.stride(ape);
                        const double v = rho0.at(k, a, a).real();
                        line += eax.weight(e) * v;
                        if (e == 0 || e == eax.nodes - 1) edge += eax.weight(e) * std::abs(v);
                    }
                    if (line > 0.0) m.leakage = std::max(m.leakage, edge / line);
                    total += peax.weight(q) * line;
                }
                const std::size_t idx = static_cast<std::size_t>(a) * plane + static_cast<std::size_t>(i * pax.nodes + j);
                m.reduced[idx] = total;
                const double p = pax.coord(j);
                m.h_t[idx] = frames.frames[static_cast<std::size_t>(i)].E[a] + p * p / (2.0 * spec.mass);
            }
        }
    }
    if (m.leakage > 1e-8) {
        m.warnings.push_back("eta-domain truncation leaks " + std::to_string(m.leakage) +
                             " of the shell integrand; widen the eta axis");
    }

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < m.reduced.size(); ++i) {
        if (m.reduced[i] > 0.0 && std::isfinite(std::log(m.reduced[i]))) {
            xs.push_back(m.h_t[i]);
            ys.push_back(std::log(m.reduced[i]));
        }
    }
    const LineFit fit = fit_line(xs, ys);
    m.slope = fit.slope;
    m.intercept = fit.intercept;
    m.fit_rms = fit.rms_residual;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m.fit_max = std::max(m.fit_max, std::abs(ys[i] - fit.intercept - fit.slope * xs[i]));
    }
    return m;
}

std::shared_ptr<const PhaseGrid> nose_shell_grid(const EnsembleSpec& spec, const FrameField& frames,
                                                 const GridAxis& r_axis, const GridAxis& p_axis, double C,
                                                 double sigma_E, int p_eta_nodes, double p_eta_sigmas,
                                                 double eta_resolution) {
    if (spec.kind != Layout::Nose) throw std::invalid_argument("shell grid needs the Nose layout");
    if (frames.frames.size() != static_cast<std::size_t>(r_axis.nodes)) {
        throw StructuralError("adiabatic frames do not cover the R axis");
    }
    const double gkt = spec.g_eff() * spec.kT();
    const double width = sigma_E / gkt;
    const double pe_half = p_eta_sigmas * std::sqrt(spec.m_eta * spec.kT() * spec.g_eff() / spec.n_phys);
    const double k_max = pe_half * pe_half / (2.0 * spec.m_eta);

    double h_min = std::numeric_limits<double>::infinity(), h_max = -h_min;
    for (int i = 0; i < r_axis.nodes; ++i) {
        for (int j = 0; j < p_axis.nodes; ++j) {
            const double kin = p_axis.coord(j) * p_axis.coord(j) / (2.0 * spec.mass);
            for (int a = 0; a < frames.n(); ++a) {
                const double h = frames.frames[static_cast<std::size_t>(i)].E[a] + kin;
                h_min = std::min(h_min, h);
                h_max = std::max(h_max, h);
            }
        }
    }
    const double eta_lo = (C - h_max - k_max) / gkt - 8.0 * width;
    const double eta_hi = (C - h_min) / gkt + 8.0 * width;
    const int eta_nodes = std::max(8, static_cast<int>(std::ceil((eta_hi - eta_lo) / (eta_resolution * width))) + 1);

    GridAxis eta{"eta", eta_lo, eta_hi, eta_nodes, Boundary::Truncated};
    GridAxis pe{"p_eta", -pe_half, pe_half, p_eta_nodes, Boundary::Truncated};
    GridAxis r = r_axis, p = p_axis;
    r.name = "R";
    p.name = "P";
    return std::make_shared<const PhaseGrid>(std::vector<GridAxis>{r, eta, p, pe});
}

WeightSignResult resolve_weight_sign(const StationarySpec& exponential, const FrameField& frames,
                                     const LiouvillianOp& op, const StationarySpec& shell,
                                     const FrameField& shell_frames, std::shared_ptr<const PhaseGrid> shell_grid) {
    WeightSignResult r;
    r.expected_slope = -shell.ensemble.beta() * shell.ensemble.n_phys / shell.ensemble.g_eff();
    for (int sign : {-1, 1}) {
        StationarySpec e = exponential;
        e.weight_sign = sign;
        const double res = stationarity_residual(stationary_rho0(e, frames, op.grid_ptr()), op);
        StationarySpec s = shell;
        s.weight_sign = sign;
        const double slope = marginalize_nose(stationary_rho0(s, shell_frames, shell_grid), shell_frames, s.ensemble).slope;
        (sign < 0 ? r.residual_minus : r.residual_plus) = res;
        (sign < 0 ? r.slope_minus : r.slope_plus) = slope;
    }
    r.chosen = r.residual_minus <= r.residual_plus ? -1 : 1;
    const double slope = r.chosen < 0 ? r.slope_minus : r.slope_plus;
    r.consistent = std::abs(slope - r.expected_slope) <= 0.01 * std::abs(r.expected_slope);
    return r;
}

}  // namespace nhbrack
