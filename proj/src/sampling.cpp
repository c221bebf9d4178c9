// sampling.cpp: long-trajectory canonical sampling, histograms and distribution fits.
#include "nhbrack/sampling.hpp"

#include "nhbrack/errors.hpp"
#include "nhbrack/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nhbrack {

Histogram::Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0.0) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins > 0 and hi > lo");
}

void Histogram::add(double v) {
    if (v < lo) {
        below += 1.0;
        return;
    }
    if (v >= hi) {
        above += 1.0;
        return;
    }
    auto i = static_cast<std::size_t>((v - lo) / width());
    i = std::min(i, counts.size() - 1);
    counts[i] += 1.0;
    total += 1.0;
}

std::vector<double> Histogram::density() const {
    std::vector<double> d(counts.size(), 0.0);
    const double all = total + below + above;
    if (all <= 0.0) return d;
    for (std::size_t i = 0; i < counts.size(); ++i) d[i] = counts[i] / (all * width());
    return d;
}

CanonicalSample sample_canonical(const EnsembleSpec& spec, const Potential& phi, const PhasePoint& x0,
                                 const SamplingOptions& opt) {
    spec.validate();
    if (spec.kind != Layout::Nose && spec.kind != Layout::NHC2) {
        throw std::invalid_argument("canonical sampling needs a Nose or NHC2 thermostat");
    }
    if (x0.layout() != spec.kind || x0.index().n_phys != spec.n_phys) {
        throw StructuralError("initial point layout does not match the ensemble");
    }
    if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be > 0");

    CanonicalSample out;
    if (spec.kind == Layout::Nose && spec.n_phys == 1 && phi.name == "harmonic") {
        out.warnings.push_back(
            "bare Nose thermostat on a single harmonic oscillator is not ergodic; marginals will not be canonical");
    }
    const double kt_eff = spec.kT() * spec.g_eff() / spec.n_phys;
    const double p_half = opt.p_range * std::sqrt(spec.mass * kt_eff);
    out.p = Histogram(-p_half, p_half, opt.bins);
    out.r = Histogram(-opt.r_range, opt.r_range, opt.bins);

    const LayoutIndex ix = spec.index();
    const int n = spec.n_phys;
    FlowFn flow = [&](const Eigen::VectorXd& x, Eigen::VectorXd& xdot, double& kappa) {
        const Eigen::VectorXd force = -phi.gradient(x.segment(ix.r(0), n));
        xdot.resize(x.size());
        flow_velocity(spec, x.data(), force.data(), xdot.data());
        kappa = kappa_closed_form(spec, x);
    };
    Rk4Stepper stepper(flow);
    Eigen::VectorXd x = x0.coords();
    double w = 0.0;
    double sum_p2 = 0.0, sum_r2 = 0.0;
    for (std::size_t k = 1; k <= opt.steps; ++k) {
        stepper.step(x, w, opt.dt);
        if (!x.allFinite()) throw NumericalFailure("non-finite state during canonical sampling", k);
        if (k <= opt.burn_in) continue;
        const double r = x[ix.r(0)];
        const double p = x[ix.p(0)];
        out.r.add(r);
        out.p.add(p);
        sum_p2 += p * p;
        sum_r2 += r * r;
        ++out.samples;
    }
    if (out.samples > 0) {
        out.mean_p2 = sum_p2 / static_cast<double>(out.samples);
        out.mean_r2 = sum_r2 / static_cast<double>(out.samples);
    }
    return out;
}

double ks_distance_gaussian(const Histogram& h, double sigma) {
    const double all = h.total + h.below + h.above;
    if (all <= 0.0) throw std::invalid_argument("KS distance of an empty histogram");
    auto cdf = [sigma](double v) { return 0.5 * std::erfc(-v / (sigma * std::sqrt(2.0))); };
    double cum = h.below;
    double worst = std::abs(cum / all - cdf(h.lo));
    for (std::size_t i = 0; i < h.bins(); ++i) {
        cum += h.counts[i];
        const double edge = h.lo + static_cast<double>(i + 1) * h.width();
        worst = std::max(worst, std::abs(cum / all - cdf(edge)));
    }
    return worst;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weight) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs >= 2 matching points");
    if (!weight.empty() && weight.size() != x.size()) throw std::invalid_argument("weight size mismatch");
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = weight.empty() ? 1.0 : weight[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
        sxx += wi * x[i] * x[i];
        sxy += wi * x[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (!(std::abs(det) > 0.0)) throw std::invalid_argument("degenerate line fit");
    LineFit f;
    f.slope = (sw * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / sw;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = weight.empty() ? 1.0 : weight[i];
        const double r = y[i] - f.intercept - f.slope * x[i];
        ss += wi * r * r;
    }
    f.rms_residual = std::sqrt(ss / sw);
    return f;
}

LineFit fit_momentum_log_slope(const Histogram& p, double mass, double min_count) {
    std::vector<double> xs, ys, ws;
    const auto dens = p.density();
    for (std::size_t i = 0; i < p.bins(); ++i) {
        if (p.counts[i] < min_count) continue;
        const double c = p.center(i);
        xs.push_back(c * c / (2.0 * mass));
        ys.push_back(std::log(dens[i]));
        ws.push_back(p.counts[i]);  // inverse variance of log(count) for Poisson counts
    }
    return fit_line(xs, ys, ws);
}

}  // namespace nhbrack
