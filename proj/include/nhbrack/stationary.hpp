// stationary.hpp: stationary density matrices to first order in hbar and
// their verification.
#pragma once

#include "nhbrack/qcle.hpp"

#include <memory>
#include <string>
#include <vector>

namespace nhbrack {

enum class StationaryForm {
    DeltaShell,   // Gaussian-regularized delta(C - H^a), Nose layout
    Exponential,  // exp(-beta H^a) for any thermostatted layout
};

struct StationarySpec {
    EnsembleSpec ensemble;
    StationaryForm form{StationaryForm::Exponential};
    double C{0.0};         // shell value for DeltaShell
    double sigma_E{0.05};  // shell width
    double hbar{1.0};
    int order{0};
    // rho^(0) carries exp(weight_sign * w) with dw/dt = kappa; -1 makes the
    // form exactly stationary (see resolve_weight_sign).
    int weight_sign{-1};

    void validate() const;
};

// Diagonal rho^(0), normalized to unit trace. DeltaShell throws DomainError
// unless every surface's energy range on the grid extends 6 sigma_E past C.
DensityField stationary_rho0(const StationarySpec& spec, const FrameField& frames,
                             std::shared_ptr<const PhaseGrid> grid);

// (1 - exp(-beta x)) / (-x) + (beta/2)(1 + exp(-beta x)), with a series
// branch for |x| < 1e-4.
double rho1_bracket_factor(double x, double beta);

// Closed-form off-diagonal order-hbar term
// rho1^{ab} = -i (P/M) d_ab rho0^{bb} X(E_a - E_b).
DensityField stationary_rho1(const DensityField& rho0, const FrameField& frames, const EnsembleSpec& spec);

// rho1^{ab} = -i (J rho0)^{ab} / (E_a - E_b) with the operator's jump stencil.
DensityField rho1_from_recursion(const DensityField& rho0, const LiouvillianOp& op);

// ||(iL + kappa) rho|| / ||rho||; needs a density-side operator.
double stationarity_residual(const DensityField& rho, const LiouvillianOp& op);

struct FredholmResult {
    // value[a][m] = int dM 2 Re sum_{b > b'} (J_{aa,bb'} rho^{bb'}) (H^a)^m, m = 0, 1, 2
    std::vector<std::vector<double>> values;
    double max_abs{0.0};
};
FredholmResult fredholm_check(const DensityField& rho_offdiag, const LiouvillianOp& op);

// Test density with a real, P-odd off-diagonal part:
// rho^{ab} = amplitude (P/M) (rho0^{aa} + rho0^{bb}) / 2 for a != b.
DensityField parity_violating_control(const DensityField& rho0, const EnsembleSpec& spec, double amplitude = 0.1);

struct MarginalResult {
    int n{0};
    int r_nodes{0};
    int p_nodes{0};
    std::vector<double> reduced;  // [a][iR][iP]
    std::vector<double> h_t;      // E_a(R) + P^2/2M, same layout
    double slope{0.0};
    double intercept{0.0};
    double fit_rms{0.0};
    double fit_max{0.0};
    double expected_slope{0.0};  // -beta N / g
    double leakage{0.0};         // largest eta-boundary share of a line integral
    std::vector<std::string> warnings;
};
// Integrates rho0^{aa} over (eta, p_eta) of a Nose grid and fits
// log(reduced) against E_a(R) + P^2/2M.
MarginalResult marginalize_nose(const DensityField& rho0, const FrameField& frames, const EnsembleSpec& spec);

// Nose grid whose eta axis covers the shell C for every (R, P, p_eta) node
// with 8 eta-widths sigma_E/(g k_B T) of margin and spacing
// `eta_resolution` widths; p_eta spans +-p_eta_sigmas thermal widths.
std::shared_ptr<const PhaseGrid> nose_shell_grid(const EnsembleSpec& spec, const FrameField& frames,
                                                 const GridAxis& r_axis, const GridAxis& p_axis, double C,
                                                 double sigma_E, int p_eta_nodes = 16, double p_eta_sigmas = 5.0,
                                                 double eta_resolution = 0.8);

struct WeightSignResult {
    int chosen{-1};
    double residual_minus{0.0};  // sign -1
    double residual_plus{0.0};   // sign +1
    double slope_minus{0.0};
    double slope_plus{0.0};
    double expected_slope{0.0};
    bool consistent{false};  // chosen sign also gives the expected marginal slope (1%)
};
// Compares both signs: residuals of the exponential form under `op`, and
// marginal slopes of the delta-shell form on `shell_grid`.
WeightSignResult resolve_weight_sign(const StationarySpec& exponential, const FrameField& frames,
                                     const LiouvillianOp& op, const StationarySpec& shell,
                                     const FrameField& shell_frames, std::shared_ptr<const PhaseGrid> shell_grid);

}  // namespace nhbrack
