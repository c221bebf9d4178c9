// qcle.hpp: grid discretization of the quantum-classical (Nose-)Liouville
// equation in the adiabatic basis.
#pragma once

#include "nhbrack/adiabatic.hpp"
#include "nhbrack/ensemble.hpp"
#include "nhbrack/phase_grid.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nhbrack {

using cplx = std::complex<double>;

// rho^{ab}(X) (or an observable chi^{ab}(X)) on a grid; node-major storage
// with the state pair (a, b) at offset a * n + b.
class DensityField {
public:
    DensityField(std::shared_ptr<const PhaseGrid> grid, int n);

    const PhaseGrid& grid() const { return *grid_; }
    const std::shared_ptr<const PhaseGrid>& grid_ptr() const { return grid_; }
    int n() const { return n_; }
    std::size_t nodes() const { return grid_->size(); }
    std::size_t stride() const { return static_cast<std::size_t>(n_ * n_); }

    cplx& at(std::size_t k, int a, int b) { return values_[k * stride() + static_cast<std::size_t>(a * n_ + b)]; }
    cplx at(std::size_t k, int a, int b) const { return values_[k * stride() + static_cast<std::size_t>(a * n_ + b)]; }
    cplx* data() { return values_.data(); }
    const cplx* data() const { return values_.data(); }
    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }

    // Tr' of the trapezoid integral.
    cplx trace() const;
    double hermiticity_defect() const;  // max_k max_ab |rho_ab - conj(rho_ba)|
    double l2_norm() const;             // sqrt(sum_k w_k sum_ab |rho_ab|^2)
    void normalize();                   // trace -> 1
    // exp(-w(X)) per node for the ensemble's measure exponent.
    std::vector<double> measure_weights(const EnsembleSpec& spec) const;

    DensityField& operator+=(const DensityField& o);
    DensityField& operator*=(cplx s);
    void axpy(cplx s, const DensityField& x);  // this += s * x
    void check_compatible(const DensityField& o) const;

private:
    std::shared_ptr<const PhaseGrid> grid_;
    int n_;
    std::vector<cplx> values_;
};

// Adiabatic frames at every node of the grid's R axis.
struct FrameField {
    std::vector<AdiabaticFrame> frames;
    double hbar{1.0};

    static FrameField build(const QuantumModel& m, const GridAxis& r_axis, double hbar);
    int n() const { return frames.empty() ? 0 : frames.front().n(); }
};

enum class Side { Observable, Density };
enum class FlowScheme { Upwind3, Central4, Spectral };
enum class JumpScheme { Central4, Spectral };

struct LiouvillianOptions {
    FlowScheme flow{FlowScheme::Upwind3};
    JumpScheme jump{JumpScheme::Central4};
    bool include_jump{true};
    bool include_kappa{true};  // density side only
    bool frozen{false};        // no classical flow and no jump: pure i omega rotation
};

// Observable side: d chi/dt = (i omega + iL - J) chi.
// Density side:    d rho/dt = -(i omega + iL + kappa) rho + J rho.
// iL is the flow B grad H^{ab} with the mean force (F^a + F^b)/2; J couples
// surfaces through d_ab [P/M + (E_a - E_b)/2 d/dP]. Truncated axes use zero
// values beyond the boundary.
class LiouvillianOp {
public:
    LiouvillianOp(FrameField frames, EnsembleSpec spec, std::shared_ptr<const PhaseGrid> grid, Side side,
                  LiouvillianOptions options);

    Side side() const { return side_; }
    const EnsembleSpec& spec() const { return spec_; }
    const PhaseGrid& grid() const { return *grid_; }
    const std::shared_ptr<const PhaseGrid>& grid_ptr() const { return grid_; }
    const FrameField& frames() const { return frames_; }
    const LiouvillianOptions& options() const { return options_; }
    int n() const { return n_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // out = d/dt of `in`.
    void rate(const DensityField& in, DensityField& out) const;
    // Time derivative at a single node into out[n*n].
    void rate_at(const DensityField& in, std::size_t k, cplx* out) const;
    // (J f) only, with the configured jump scheme.
    void apply_jump(const DensityField& in, DensityField& out) const;
    // ||rate(in)|| / ||in|| in the grid L2 norm, without storing the rate.
    double relative_rate_norm(const DensityField& in) const;

    // Extended energy H^a(X) on surface a at node k.
    double surface_energy(std::size_t k, int a) const;
    const AdiabaticFrame& frame_at(std::size_t k) const {
        return frames_.frames[static_cast<std::size_t>(grid_->index_along(k, r_axis_))];
    }
    double kappa_at(std::size_t k) const;

    // Largest stable dt: 0.5 min(dx/|v|) and 0.1 / max|omega|.
    double max_stable_dt() const;
    double max_advection_dt() const { return advection_dt_; }
    double max_omega() const { return max_omega_; }

private:
    cplx derivative(const DensityField& f, std::size_t k, int pair, int axis, double transport, bool jump) const;

    FrameField frames_;
    EnsembleSpec spec_;
    std::shared_ptr<const PhaseGrid> grid_;
    Side side_;
    LiouvillianOptions options_;
    int n_;
    int r_axis_;
    int p_axis_;
    std::vector<Eigen::MatrixXd> spectral_;  // per axis, empty unless needed
    GeneralizedEnergy extended_;              // H without the surface energy
    std::vector<std::string> warnings_;
    double advection_dt_{0.0};
    double max_omega_{0.0};
};

LiouvillianOp build_liouvillian(const FrameField& frames, const EnsembleSpec& spec,
                                std::shared_ptr<const PhaseGrid> grid, Side side,
                                const LiouvillianOptions& options = {});

// Axes for a layout, in layout order, with the given ranges and node counts.
std::shared_ptr<const PhaseGrid> make_layout_grid(const EnsembleSpec& spec, const std::vector<GridAxis>& axes);

struct PropagationRow {
    double t;
    double trace;
    double herm_drift;
    double energy;
};

struct PropagationResult {
    DensityField field;
    std::vector<PropagationRow> diagnostics;
};

// RK4 in time. Throws CflError when dt exceeds max_stable_dt() and
// NumericalFailure on non-finite values.
PropagationResult propagate(const LiouvillianOp& op, const DensityField& f0, double dt, std::size_t steps,
                            std::size_t diag_stride = 1);

// Tr' int dX rho chi (chi in the adiabatic basis): {real part, imaginary residual}.
struct Expectation {
    double value;
    double imag;
};
Expectation expectation(const DensityField& rho, const DensityField& obs);
Expectation expectation(const DensityField& rho, const std::function<double(const Eigen::VectorXd&, int)>& per_state);
// Tr' int rho^{aa} H^a.
double energy_functional(const LiouvillianOp& op, const DensityField& rho);

// Diagnostics CSV t,trace,herm_drift,energy.
void write_diagnostics_csv(const std::vector<PropagationRow>& rows, const std::string& path);
// R,P,rho_11,rho_22,re_rho_12,im_rho_12 on the (R, P) plane; other axes are
// fixed at the node nearest to zero.
void write_snapshot_csv(const DensityField& rho, const std::string& path);

}  // namespace nhbrack
