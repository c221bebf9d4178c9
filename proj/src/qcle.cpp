// qcle.cpp: quantum-classical Liouville operator in the adiabatic basis and its RK4 propagator.
#include "nhbrack/qcle.hpp"

#include "nhbrack/csv.hpp"
#include "nhbrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nhbrack {

namespace {

const cplx I{0.0, 1.0};
constexpr int kMaxDims = 8;

}  // namespace

// ---------------------------------------------------------------- DensityField

DensityField::DensityField(std::shared_ptr<const PhaseGrid> grid, int n) : grid_(std::move(grid)), n_(n) {
    if (!grid_) throw std::invalid_argument("density field needs a grid");
    if (n_ < 1) throw StructuralError("quantum dimension must be >= 1");
    values_.assign(grid_->size() * stride(), cplx{});
}

cplx DensityField::trace() const {
    cplx t{};
    for (std::size_t k = 0; k < nodes(); ++k) {
        cplx s{};
        for (int a = 0; a < n_; ++a) s += at(k, a, a);
        t += grid_->weight(k) * s;
    }
    return t;
}

double DensityField::hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t k = 0; k < nodes(); ++k) {
        for (int a = 0; a < n_; ++a) {
            for (int b = a; b < n_; ++b) m = std::max(m, std::abs(at(k, a, b) - std::conj(at(k, b, a))));
        }
    }
    return m;
}

double DensityField::l2_norm() const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes(); ++k) {
        double local = 0.0;
        for (std::size_t p = 0; p < stride(); ++p) local += std::norm(values_[k * stride() + p]);
        s += grid_->weight(k) * local;
    }
    return std::sqrt(s);
}

void DensityField::normalize() {
    const cplx t = trace();
    if (!(std::abs(t) > 0.0)) throw std::runtime_error("cannot normalize a field with zero trace");
    const double inv = 1.0 / t.real();
    for (auto& v : values_) v *= inv;
}

std::vector<double> DensityField::measure_weights(const EnsembleSpec& spec) const {
    if (grid_->dims() != spec.dim()) throw StructuralError("grid does not match the ensemble layout");
    std::vector<double> w(nodes());
    for (std::size_t k = 0; k < nodes(); ++k) w[k] = std::exp(-phase_weight(spec, grid_->point(k)));
    return w;
}

void DensityField::check_compatible(const DensityField& o) const {
    if (n_ != o.n_) throw StructuralError("density fields have different quantum dimensions");
    if (grid_ != o.grid_ && !grid_->same_shape(*o.grid_)) throw StructuralError("density fields on different grids");
}

DensityField& DensityField::operator+=(const DensityField& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

DensityField& DensityField::operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
}

void DensityField::axpy(cplx s, const DensityField& x) {
    check_compatible(x);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * x.values_[i];
}

// ------------------------------------------------------------------ FrameField

FrameField FrameField::build(const QuantumModel& m, const GridAxis& r_axis, double hbar) {
    std::vector<double> rs(static_cast<std::size_t>(r_axis.nodes));
    for (int i = 0; i < r_axis.nodes; ++i) rs[static_cast<std::size_t>(i)] = r_axis.coord(i);
    return {adiabatize_along(m, rs, hbar), hbar};
}

// ---------------------------------------------------------------- grids

std::shared_ptr<const PhaseGrid> make_layout_grid(const EnsembleSpec& spec, const std::vector<GridAxis>& axes) {
    const LayoutIndex ix = spec.index();
    if (spec.n_phys != 1) throw StructuralError("grid propagation supports one classical coordinate");
    if (static_cast<int>(axes.size()) != ix.dim()) {
        throw StructuralError("layout '" + std::string(to_string(spec.kind)) + "' needs " + std::to_string(ix.dim()) +
                              " grid axes, got " + std::to_string(axes.size()));
    }
    const auto names = ix.names();
    std::vector<GridAxis> named = axes;
    for (std::size_t a = 0; a < named.size(); ++a) {
        if (named[a].name.empty()) named[a].name = names[a];
        if (named[a].name != names[a]) {
            throw StructuralError("grid axis " + std::to_string(a) + " is '" + named[a].name + "', expected '" +
                                  names[a] + "'");
        }
    }
    return std::make_shared<const PhaseGrid>(std::move(named));
}

// -------------------------------------------------------------- LiouvillianOp

LiouvillianOp::LiouvillianOp(FrameField frames, EnsembleSpec spec, std::shared_ptr<const PhaseGrid> grid, Side side,
                             LiouvillianOptions options)
    : frames_(std::move(frames)), spec_(std::move(spec)), grid_(std::move(grid)), side_(side), options_(options) {
    spec_.validate();
    if (!grid_) throw std::invalid_argument("Liouvillian needs a grid");
    const LayoutIndex ix = spec_.index();
    if (spec_.n_phys != 1) throw StructuralError("grid propagation supports one classical coordinate");
    if (grid_->dims() != ix.dim()) throw StructuralError("grid dimension does not match the ensemble layout");
    if (grid_->dims() > kMaxDims) throw StructuralError("too many grid axes");
    r_axis_ = ix.r(0);
    p_axis_ = ix.p(0);
    if (frames_.frames.size() != static_cast<std::size_t>(grid_->axis(r_axis_).nodes)) {
        throw StructuralError("adiabatic frames do not cover the R axis");
    }
    for (int i = 0; i < grid_->axis(r_axis_).nodes; ++i) {
        if (std::abs(frames_.frames[static_cast<std::size_t>(i)].R - grid_->axis(r_axis_).coord(i)) > 1e-12) {
            throw StructuralError("adiabatic frame positions do not match the R axis nodes");
        }
    }
    n_ = frames_.n();
    extended_ = make_energy(spec_, Potential::zero());

    spectral_.resize(static_cast<std::size_t>(grid_->dims()));
    for (int a = 0; a < grid_->dims(); ++a) {
        const bool need = options_.flow == FlowScheme::Spectral ||
                          (a == p_axis_ && options_.jump == JumpScheme::Spectral && options_.include_jump);
        if (!need) continue;
        const GridAxis& ax = grid_->axis(a);
        if (ax.boundary != Boundary::Periodic) {
            throw UnsupportedError("spectral derivatives need periodic axes ('" + ax.name + "')");
        }
        spectral_[static_cast<std::size_t>(a)] = spectral_diff_matrix(ax.nodes, ax.max - ax.min);
    }

    // Stability limits and resolution checks.
    const int d = grid_->dims();
    std::vector<double> vmax(static_cast<std::size_t>(d), 0.0);
    double jump_speed = 0.0;
    for (const auto& f : frames_.frames) {
        max_omega_ = std::max(max_omega_, f.omega.cwiseAbs().maxCoeff());
        for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) {
                double s = 0.0;
                for (int c = 0; c < n_; ++c) {
                    s += std::abs(f.d(a, c) * (f.E[a] - f.E[c])) * 0.5 + std::abs(f.d(b, c) * (f.E[b] - f.E[c])) * 0.5;
                }
                jump_speed = std::max(jump_speed, s);
            }
        }
    }
    if (!options_.frozen) {
        double x[kMaxDims], v[kMaxDims];
        for (std::size_t k = 0; k < grid_->size(); ++k) {
            for (int a = 0; a < d; ++a) x[a] = grid_->coord(k, a);
            const AdiabaticFrame& f = frame_at(k);
            for (int a = 0; a < n_; ++a) {
                for (int b = a; b < n_; ++b) {
                    const double force = 0.5 * (f.F_diag[a] + f.F_diag[b]);
                    flow_velocity(spec_, x, &force, v);
                    for (int ax = 0; ax < d; ++ax) vmax[static_cast<std::size_t>(ax)] = std::max(vmax[static_cast<std::size_t>(ax)], std::abs(v[ax]));
                }
            }
        }
        if (options_.include_jump) vmax[static_cast<std::size_t>(p_axis_)] += jump_speed;
    }
    advection_dt_ = std::numeric_limits<double>::infinity();
    for (int a = 0; a < d; ++a) {
        if (vmax[static_cast<std::size_t>(a)] > 0.0) {
            advection_dt_ = std::min(advection_dt_, 0.5 * grid_->axis(a).spacing() / vmax[static_cast<std::size_t>(a)]);
        }
    }
    for (std::size_t i = 0; i + 1 < frames_.frames.size(); ++i) {
        const auto& f0 = frames_.frames[i];
        const auto& f1 = frames_.frames[i + 1];
        if (max_omega_ > 0.0 && (f1.omega - f0.omega).cwiseAbs().maxCoeff() > 0.5 * max_omega_) {
            warnings_.push_back("R spacing does not resolve the variation of omega; refine the R axis");
            break;
        }
    }
}

double LiouvillianOp::max_stable_dt() const {
    double dt = advection_dt_;
    if (max_omega_ > 0.0) dt = std::min(dt, 0.1 / max_omega_);
    return dt;
}

double LiouvillianOp::kappa_at(std::size_t k) const {
    double x[kMaxDims];
    for (int a = 0; a < grid_->dims(); ++a) x[a] = grid_->coord(k, a);
    return kappa_closed_form(spec_, Eigen::Map<const Eigen::VectorXd>(x, grid_->dims()));
}

double LiouvillianOp::surface_energy(std::size_t k, int a) const {
    return frame_at(k).E[a] + extended_.value(grid_->point(k));
}

cplx LiouvillianOp::derivative(const DensityField& f, std::size_t k, int pair, int axis, double transport,
                               bool jump) const {
    const GridAxis& ax = grid_->axis(axis);
    const int n = ax.nodes;
    const int i = grid_->index_along(k, axis);
    const std::size_t s = grid_->stride(axis);
    const std::size_t base = k - static_cast<std::size_t>(i) * s;
    const std::size_t width = f.stride();
    const cplx* data = f.data();
    const bool periodic = ax.boundary == Boundary::Periodic;
    auto get = [&](int j) -> cplx {
        if (periodic) {
            j = ((j % n) + n) % n;
        } else if (j < 0 || j >= n) {
            return {};
        }
        return data[(base + static_cast<std::size_t>(j) * s) * width + static_cast<std::size_t>(pair)];
    };
    const double h = ax.spacing();
    const bool spectral = jump ? options_.jump == JumpScheme::Spectral : options_.flow == FlowScheme::Spectral;
    if (spectral) {
        const Eigen::MatrixXd& dm = spectral_[static_cast<std::size_t>(axis)];
        cplx v{};
        for (int j = 0; j < n; ++j) v += dm(i, j) * get(j);
        return v;
    }
    if (jump || options_.flow == FlowScheme::Central4) {
        return (get(i - 2) - 8.0 * get(i - 1) + 8.0 * get(i + 1) - get(i + 2)) / (12.0 * h);
    }
    if (transport > 0.0) {
        return (2.0 * get(i + 1) + 3.0 * get(i) - 6.0 * get(i - 1) + get(i - 2)) / (6.0 * h);
    }
    return (-get(i + 2) + 6.0 * get(i + 1) - 3.0 * get(i) - 2.0 * get(i - 1)) / (6.0 * h);
}

void LiouvillianOp::rate_at(const DensityField& in, std::size_t k, cplx* out) const {
    const int d = grid_->dims();
    const bool density = side_ == Side::Density;
    const AdiabaticFrame& f = frame_at(k);
    double x[kMaxDims], v[kMaxDims];
    for (int a = 0; a < d; ++a) x[a] = grid_->coord(k, a);
    const double kappa =
        density && options_.include_kappa ? kappa_closed_form(spec_, Eigen::Map<const Eigen::VectorXd>(x, d)) : 0.0;
    const double pm = x[p_axis_] / spec_.mass;
    const std::size_t width = in.stride();
    const cplx* node = in.data() + k * width;

    // dP derivatives of every pair, needed by the jump term.
    cplx dp[64];
    const bool jump = options_.include_jump && !options_.frozen && n_ > 1;
    if (jump) {
        for (int p = 0; p < n_ * n_; ++p) dp[p] = derivative(in, k, p, p_axis_, 0.0, true);
    }

    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            const int p = a * n_ + b;
            const cplx rho = node[p];
            cplx val = (density ? -I : I) * f.omega(a, b) * rho;
            if (!options_.frozen) {
                const double force = 0.5 * (f.F_diag[a] + f.F_diag[b]);
                flow_velocity(spec_, x, &force, v);
                cplx flow{};
                for (int ax = 0; ax < d; ++ax) {
                    if (v[ax] == 0.0) continue;
                    flow += v[ax] * derivative(in, k, p, ax, density ? v[ax] : -v[ax], false);
                }
                val += density ? -flow : flow;
                val -= kappa * rho;
            }
            if (jump) {
                cplx j{};
                for (int c = 0; c < n_; ++c) {
                    if (f.d(a, c) != 0.0) {
                        const int q = c * n_ + b;
                        j -= f.d(a, c) * (pm * node[q] + 0.5 * (f.E[a] - f.E[c]) * dp[q]);
                    }
                    if (f.d(b, c) != 0.0) {
                        const int q = a * n_ + c;
                        j -= f.d(b, c) * (pm * node[q] + 0.5 * (f.E[b] - f.E[c]) * dp[q]);
                    }
                }
                val += density ? j : -j;
            }
            out[p] = val;
        }
    }
}

void LiouvillianOp::rate(const DensityField& in, DensityField& out) const {
    if (in.n() != n_ || out.n() != n_) throw StructuralError("field quantum dimension does not match the Liouvillian");
    if (!in.grid().same_shape(*grid_) || !out.grid().same_shape(*grid_)) {
        throw StructuralError("field grid does not match the Liouvillian grid");
    }
    if (n_ * n_ > 64) throw StructuralError("quantum dimension too large for the grid propagator");
    const std::size_t nodes = grid_->size();
    cplx* dst = out.data();
    const std::size_t width = in.stride();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nodes; ++k) rate_at(in, k, dst + k * width);
}

void LiouvillianOp::apply_jump(const DensityField& in, DensityField& out) const {
    if (in.n() != n_ || out.n() != n_) throw StructuralError("field quantum dimension does not match the Liouvillian");
    const std::size_t nodes = grid_->size();
    const std::size_t width = in.stride();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nodes; ++k) {
        const AdiabaticFrame& f = frame_at(k);
        const double pm = grid_->coord(k, p_axis_) / spec_.mass;
        const cplx* node = in.data() + k * width;
        cplx dp[64];
        for (int p = 0; p < n_ * n_; ++p) dp[p] = derivative(in, k, p, p_axis_, 0.0, true);
        for (int a = 0; a < n_; ++a) {
            for (int b = 0; b < n_; ++b) {
                cplx j{};
                for (int c = 0; c < n_; ++c) {
                    const int q1 = c * n_ + b;
                    const int q2 = a * n_ + c;
                    j -= f.d(a, c) * (pm * node[q1] + 0.5 * (f.E[a] - f.E[c]) * dp[q1]);
                    j -= f.d(b, c) * (pm * node[q2] + 0.5 * (f.E[b] - f.E[c]) * dp[q2]);
                }
                out.data()[k * width + static_cast<std::size_t>(a * n_ + b)] = j;
            }
        }
    }
}

double LiouvillianOp::relative_rate_norm(const DensityField& in) const {
    if (in.n() != n_ || !in.grid().same_shape(*grid_)) throw StructuralError("field does not match the Liouvillian");
    const std::size_t nodes = grid_->size();
    std::vector<double> local(nodes, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nodes; ++k) {
        cplx r[64];
        rate_at(in, k, r);
        double s = 0.0;
        for (int p = 0; p < n_ * n_; ++p) s += std::norm(r[p]);
        local[k] = grid_->weight(k) * s;
    }
    double num = 0.0;
    for (double v : local) num += v;
    const double den = in.l2_norm();
    if (!(den > 0.0)) throw std::runtime_error("relative rate norm of a zero field");
    return std::sqrt(num) / den;
}

LiouvillianOp build_liouvillian(const FrameField& frames, const EnsembleSpec& spec,
                                std::shared_ptr<const PhaseGrid> grid, Side side, const LiouvillianOptions& options) {
    return LiouvillianOp(frames, spec, std::move(grid), side, options);
}

// ---------------------------------------------------------------- propagation

double energy_functional(const LiouvillianOp& op, const DensityField& rho) {
    double e = 0.0;
    for (std::size_t k = 0; k < rho.nodes(); ++k) {
        double s = 0.0;
        for (int a = 0; a < rho.n(); ++a) s += rho.at(k, a, a).real() * op.surface_energy(k, a);
        e += rho.grid().weight(k) * s;
    }
    return e;
}

PropagationResult propagate(const LiouvillianOp& op, const DensityField& f0, double dt, std::size_t steps,
                            std::size_t diag_stride) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and > 0");
    if (diag_stride == 0) throw std::invalid_argument("diagnostic stride must be >= 1");
    const double limit = op.max_stable_dt();
    if (steps > 0 && dt > limit) throw CflError("time step violates the stability limit", limit);

    PropagationResult res{f0, {}};
    DensityField& f = res.field;
    auto diag = [&](std::size_t step) {
        res.diagnostics.push_back(
            {static_cast<double>(step) * dt, f.trace().real(), f.hermiticity_defect(), energy_functional(op, f)});
    };
    diag(0);
    DensityField k1(f.grid_ptr(), f.n()), k2 = k1, k3 = k1, k4 = k1, tmp = k1;
    for (std::size_t s = 1; s <= steps; ++s) {
        op.rate(f, k1);
        tmp = f;
        tmp.axpy(0.5 * dt, k1);
        op.rate(tmp, k2);
        tmp = f;
        tmp.axpy(0.5 * dt, k2);
        op.rate(tmp, k3);
        tmp = f;
        tmp.axpy(dt, k3);
        op.rate(tmp, k4);
        auto& v = f.values();
        const auto& a = k1.values();
        const auto& b = k2.values();
        const auto& c = k3.values();
        const auto& e = k4.values();
        bool finite = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] += (dt / 6.0) * (a[i] + 2.0 * b[i] + 2.0 * c[i] + e[i]);
            finite = finite && std::isfinite(v[i].real()) && std::isfinite(v[i].imag());
        }
        if (!finite) throw NumericalFailure("non-finite density during propagation", s);
        if (s % diag_stride == 0 || s == steps) diag(s);
    }
    return res;
}

Expectation expectation(const DensityField& rho, const DensityField& obs) {
    rho.check_compatible(obs);
    cplx t{};
    const int n = rho.n();
    for (std::size_t k = 0; k < rho.nodes(); ++k) {
        cplx s{};
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) s += rho.at(k, a, b) * obs.at(k, b, a);
        }
        t += rho.grid().weight(k) * s;
    }
    return {t.real(), t.imag()};
}

Expectation expectation(const DensityField& rho, const std::function<double(const Eigen::VectorXd&, int)>& per_state) {
    cplx t{};
    for (std::size_t k = 0; k < rho.nodes(); ++k) {
        const Eigen::VectorXd x = rho.grid().point(k);
        cplx s{};
        for (int a = 0; a < rho.n(); ++a) s += rho.at(k, a, a) * per_state(x, a);
        t += rho.grid().weight(k) * s;
    }
    return {t.real(), t.imag()};
}

void write_diagnostics_csv(const std::vector<PropagationRow>& rows, const std::string& path) {
    CsvWriter out(path, {"t", "trace", "herm_drift", "energy"});
    for (const auto& r : rows) out.row({r.t, r.trace, r.herm_drift, r.energy});
}

void write_snapshot_csv(const DensityField& rho, const std::string& path) {
    const PhaseGrid& g = rho.grid();
    const int d = g.dims();
    const int r_axis = 0;
    const int p_axis = d / 2;
    std::vector<int> fixed(static_cast<std::size_t>(d), 0);
    for (int a = 0; a < d; ++a) {
        const GridAxis& ax = g.axis(a);
        int best = 0;
        for (int i = 1; i < ax.nodes; ++i) {
            if (std::abs(ax.coord(i)) < std::abs(ax.coord(best))) best = i;
        }
        fixed[static_cast<std::size_t>(a)] = best;
    }
    CsvWriter out(path, {"R", "P", "rho_11", "rho_22", "re_rho_12", "im_rho_12"});
    for (int i = 0; i < g.axis(r_axis).nodes; ++i) {
        for (int j = 0; j < g.axis(p_axis).nodes; ++j) {
            std::size_t k = 0;
            for (int a = 0; a < d; ++a) {
                int idx = fixed[static_cast<std::size_t>(a)];
                if (a == r_axis) idx = i;
                if (a == p_axis) idx = j;
                k += static_cast<std::size_t>(idx) * g.stride(a);
            }
            const double r11 = rho.at(k, 0, 0).real();
            const double r22 = rho.n() > 1 ? rho.at(k, 1, 1).real() : 0.0;
            const cplx r12 = rho.n() > 1 ? rho.at(k, 0, 1) : cplx{};
            out.row({g.axis(r_axis).coord(i), g.axis(p_axis).coord(j), r11, r22, r12.real(), r12.imag()});
        }
    }
}

}  // namespace nhbrack
