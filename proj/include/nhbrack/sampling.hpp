// sampling.hpp: time-averaged canonical sampling with thermostatted dynamics.
#pragma once

#include "nhbrack/ensemble.hpp"
#include "nhbrack/phase_point.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace nhbrack {

struct Histogram {
    double lo{0.0};
    double hi{1.0};
    std::vector<double> counts;
    double total{0.0};  // samples inside [lo, hi)
    double below{0.0};
    double above{0.0};

    Histogram() = default;
    Histogram(double lo, double hi, std::size_t bins);
    void add(double v);
    std::size_t bins() const { return counts.size(); }
    double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
    // Probability density per bin; zeros when empty.
    std::vector<double> density() const;
};

struct SamplingOptions {
    double dt{0.01};
    std::size_t steps{0};
    std::size_t burn_in{0};
    std::size_t bins{400};
    double p_range{6.0};  // histogram half-widths in units of sqrt(M k_B T g/N)
    double r_range{6.0};  // absolute half-width for the R histogram
};

struct CanonicalSample {
    Histogram r;  // first physical coordinate
    Histogram p;  // first physical momentum
    std::size_t samples{0};
    double mean_p2{0.0};
    double mean_r2{0.0};
    std::vector<std::string> warnings;
};

// Integrates the thermostatted system and histograms R and P after burn-in.
// Only Nose and NHC2 are accepted.
CanonicalSample sample_canonical(const EnsembleSpec& spec, const Potential& phi, const PhasePoint& x0,
                                 const SamplingOptions& opt);

// Kolmogorov-Smirnov distance between a binned sample and N(0, sigma^2),
// evaluated at bin edges.
double ks_distance_gaussian(const Histogram& h, double sigma);

// Weighted least-squares fit y = a + b x; returns {b, rms residual}.
struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double rms_residual{0.0};
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weight = {});

// Slope of log(density) against P^2/2M from the P histogram, using bins with
// at least `min_count` samples.
LineFit fit_momentum_log_slope(const Histogram& p, double mass, double min_count = 100.0);

}  // namespace nhbrack
