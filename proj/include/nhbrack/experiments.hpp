// experiments.hpp: the verification experiments behind the nhbrack CLI.
#pragma once

#include "nhbrack/config.hpp"
#include "nhbrack/qcle.hpp"
#include "nhbrack/stationary.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhbrack {

// Sampling run that produced no samples after burn-in.
class InsufficientSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Check {
    std::string name;
    bool pass{false};
    std::string detail;
};

struct ExperimentResult {
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    std::vector<std::string> artifacts;

    bool passed() const;
    void add(std::string name, bool pass, std::string detail) {
        checks.push_back({std::move(name), pass, std::move(detail)});
    }
};

// Runs c.experiment and writes artifacts into c.output.dir.
ExperimentResult run_experiment(const RunConfig& c);

// "PASS <name> (<detail>)" per check, then warnings.
void print_summary(const ExperimentResult& r, std::ostream& out);

// Default classical start: R = initial.state or R = 1, V = 1, the rest 0.
Eigen::VectorXd initial_state(const RunConfig& c);

// Gaussian in (R, P) on one adiabatic surface, Gaussian in the remaining axes
// around zero (the volume axis around its midpoint); off-diagonal entries
// carry `coherence` times the geometric mean of the populations. Unit trace.
DensityField gaussian_density(std::shared_ptr<const PhaseGrid> grid, const EnsembleSpec& spec, int n,
                              const InitialConfig& init);

// Periodic axes for stationary residuals: R over [-r_half, r_half), momenta
// over +-p_sigmas thermal widths, thermostat coordinates over [-1, 1).
std::vector<GridAxis> stationary_axes(const EnsembleSpec& spec, int r_nodes, double r_half, int p_nodes,
                                      int thermostat_p_nodes, int eta_nodes, double p_sigmas = 5.0);

struct HbarRow {
    double hbar{0.0};
    double order0{0.0};
    double order1{0.0};
    double ratio() const { return order0 / order1; }
};

struct SigmaRow {
    double sigma_E{0.0};
    double slope{0.0};
    double fit_residual{0.0};
    double mean_h{0.0};  // <E_a + P^2/2M> under the shell density
};

struct StationaryCheckOptions {
    EnsembleSpec ensemble;  // Nose or NHC2 for the exponential residuals
    ModelConfig model;      // coupled model
    double hbar{0.2};
    std::vector<double> hbar_series{0.4, 0.2, 0.1};
    double C{1.5};
    double sigma_E{0.05};
    std::vector<double> sigma_E_series{0.1, 0.05, 0.025};
    // Residual grids.
    int r_nodes{24};
    double r_half{7.0};
    int p_nodes{16};
    int thermostat_p_nodes{16};
    int eta_nodes{8};
    int decoupled_r_nodes{16};
    // Marginal (shell) grid.
    int shell_r_nodes{12};
    int shell_p_nodes{12};
    int shell_p_eta_nodes{12};
    double shell_half{3.0};
    // Fredholm / recursion grid (Nose layout).
    int recursion_p_nodes{32};
    double recursion_p_half{7.0};
};

struct StationaryCheckResult {
    double order0_decoupled{0.0};  // d == 0 model
    double order0_residual{0.0};   // coupled model, order 0 at hbar
    double order1_residual{0.0};   // coupled model, order 0 + hbar order 1 at hbar
    double no_kappa_residual{0.0};  // d == 0 model with kappa omitted
    std::vector<HbarRow> hbar_rows;
    double marginal_slope{0.0};
    double marginal_expected{0.0};
    double marginal_fit_residual{0.0};
    double marginal_leakage{0.0};
    double marginal_slope_2n{0.0};
    double marginal_expected_2n{0.0};
    double marginal_fit_residual_2n{0.0};
    double fredholm_max{0.0};
    double fredholm_control{0.0};
    double recursion_max{0.0};
    double hermiticity{0.0};
    double offdiag_order0{0.0};
    double factorization{0.0};
    WeightSignResult sign;
    std::vector<SigmaRow> sigma_rows;
    std::vector<std::string> warnings;

    nlohmann::json report() const;
};

StationaryCheckResult stationary_check(const StationaryCheckOptions& opt);

}  // namespace nhbrack
