// integrator.hpp: explicit RK4 for X' = B(X) grad H with measure bookkeeping.
#pragma once

#include "nhbrack/bracket.hpp"
#include "nhbrack/phase_point.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace nhbrack {

struct TrajectoryRecord {
    LayoutIndex layout;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<double> energy;
    std::vector<double> weight;  // w(t) = integral of kappa
    std::vector<int> surface;    // adiabatic label, empty unless the run is surface-resolved

    std::size_t size() const { return times.size(); }
    double max_relative_energy_drift() const;
};

// Right-hand side and compressibility evaluated together.
using FlowFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& xdot, double& kappa)>;

// One RK4 step; the weight increment uses Simpson weights on the stage kappas,
// which matches the update of any coordinate whose rate is proportional to kappa.
class Rk4Stepper {
public:
    explicit Rk4Stepper(FlowFn flow) : flow_(std::move(flow)) {}
    void step(Eigen::VectorXd& x, double& w, double dt);

private:
    FlowFn flow_;
    Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
};

FlowFn make_flow(const BracketStructure& s, const GeneralizedEnergy& h);

// RK4 on eom_rhs; records every `stride` steps (and the last one).
// Throws NumericalFailure on non-finite states.
TrajectoryRecord integrate(const BracketStructure& s, const GeneralizedEnergy& h, const PhasePoint& x0, double dt,
                           std::size_t steps, std::size_t stride = 1);

// CSV with header t,<coordinate names>,H,w.
void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path);

}  // namespace nhbrack
