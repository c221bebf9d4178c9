// integrator.cpp: RK4 trajectories of the bracket flow.
#include "nhbrack/integrator.hpp"

#include "nhbrack/csv.hpp"
#include "nhbrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nhbrack {

double TrajectoryRecord::max_relative_energy_drift() const {
    if (energy.empty()) return 0.0;
    const double e0 = energy.front();
    const double scale = std::max(std::abs(e0), 1e-300);
    double worst = 0.0;
    for (double e : energy) worst = std::max(worst, std::abs(e - e0) / scale);
    return worst;
}

void Rk4Stepper::step(Eigen::VectorXd& x, double& w, double dt) {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    flow_(x, k1_, c1);
    tmp_ = x + 0.5 * dt * k1_;
    flow_(tmp_, k2_, c2);
    tmp_ = x + 0.5 * dt * k2_;
    flow_(tmp_, k3_, c3);
    tmp_ = x + dt * k3_;
    flow_(tmp_, k4_, c4);
    x += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    w += (dt / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
}

FlowFn make_flow(const BracketStructure& s, const GeneralizedEnergy& h) {
    return [&s, &h](const Eigen::VectorXd& x, Eigen::VectorXd& xdot, double& kappa) {
        const Eigen::VectorXd gh = h.grad(x);
        xdot = s.matrix(x) * gh;
        kappa = s.divergence(x).dot(gh);
    };
}

TrajectoryRecord integrate(const BracketStructure& s, const GeneralizedEnergy& h, const PhasePoint& x0, double dt,
                           std::size_t steps, std::size_t stride) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and > 0");
    if (stride == 0) throw std::invalid_argument("stride must be >= 1");
    if (x0.dim() != s.dim()) throw StructuralError("initial point does not match bracket dimension");

    TrajectoryRecord rec;
    rec.layout = x0.index();
    Eigen::VectorXd x = x0.coords();
    double w = 0.0;
    auto record = [&](std::size_t k) {
        rec.times.push_back(static_cast<double>(k) * dt);
        rec.states.push_back(x);
        rec.energy.push_back(h.value(x));
        rec.weight.push_back(w);
    };
    record(0);
    Rk4Stepper stepper(make_flow(s, h));
    for (std::size_t k = 1; k <= steps; ++k) {
        stepper.step(x, w, dt);
        if (!x.allFinite() || !std::isfinite(w)) throw NumericalFailure("non-finite state in RK4 integration", k);
        if (k % stride == 0 || k == steps) record(k);
    }
    return rec;
}

void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path) {
    std::vector<std::string> header{"t"};
    for (const auto& n : rec.layout.names()) header.push_back(n);
    header.push_back("H");
    header.push_back("w");
    CsvWriter out(path, header);
    std::vector<double> row;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        row.clear();
        row.push_back(rec.times[i]);
        for (Eigen::Index j = 0; j < rec.states[i].size(); ++j) row.push_back(rec.states[i][j]);
        row.push_back(rec.energy[i]);
        row.push_back(rec.weight[i]);
        out.row(row);
    }
}

}  // namespace nhbrack
