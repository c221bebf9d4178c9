// config.hpp: strict JSON run configuration for the command-line harness.
#pragma once

#include "nhbrack/adiabatic.hpp"
#include "nhbrack/ensemble.hpp"
#include "nhbrack/phase_grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nhbrack {

// Invalid configuration; the message starts with the offending JSON path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ModelConfig {
    std::string kind{"linear_vibronic"};  // linear_vibronic | spin_boson | diagonal
    int n{2};
    double a{1.0};
    double delta{1.0};
    double k{1.0};
    double epsilon{0.0};

    QuantumModel build() const;
};

// Classical potential for classical-run and sample-canonical.
struct PotentialConfig {
    std::string kind{"harmonic"};  // harmonic | quartic | surface
    double k{1.0};
    double lambda{0.0};
    int surface{0};  // adiabatic surface of `model` when kind = surface

    Potential build(const ModelConfig& model) const;
};

struct GridConfig {
    std::vector<GridAxis> axes;  // layout order; empty -> built-in defaults
    std::string flow{"upwind3"};   // upwind3 | central4 | spectral
    std::string jump{"central4"};  // central4 | spectral
};

struct InitialConfig {
    std::vector<double> state;  // classical start; empty -> R = 1, everything else 0 (V = 1)
    double r0{1.0};
    double p0{0.0};
    double sigma_r{0.5};
    double sigma_p{0.5};
    int surface{0};
    double coherence{0.0};  // real off-diagonal amplitude relative to the population
};

struct QuantumConfig {
    double hbar{1.0};
    bool frozen{false};
};

struct StationaryConfig {
    double sigma_E{0.05};
    std::vector<double> sigma_E_series{0.1, 0.05, 0.025};
    std::vector<double> hbar_series{0.4, 0.2, 0.1};
    double C{1.5};  // shell value for the Nose delta form
};

struct IntegratorConfig {
    double dt{1e-3};
    std::uint64_t steps{1000};
    std::uint64_t stride{1};
    std::uint64_t seed{0};
    std::uint64_t burn_in{0};
};

struct SamplingConfig {
    std::uint64_t bins{400};
    double p_range{6.0};
};

struct OutputConfig {
    std::string dir{"nhbrack_out"};
};

struct RunConfig {
    std::string experiment;
    ModelConfig model;
    PotentialConfig potential;
    EnsembleSpec ensemble;
    GridConfig grid;
    InitialConfig initial;
    QuantumConfig quantum;
    StationaryConfig stationary;
    IntegratorConfig integrator;
    SamplingConfig sampling;
    OutputConfig output;
    int threads{0};  // 0 -> NHBRACK_THREADS or the runtime default
};

const std::vector<std::string>& experiment_names();

// Defaults for one experiment; throws ConfigError for unknown names.
RunConfig default_config(const std::string& experiment);

// Overlays `j` on the defaults of j["experiment"] (or `experiment` when the
// document has none). Unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const nlohmann::json& j, const std::string& experiment = "");
RunConfig load_config(const std::string& path, const std::string& experiment = "");

// Every field, defaults filled in; keys sorted.
nlohmann::json to_json(const RunConfig& c);
std::string canonical_config(const RunConfig& c);

}  // namespace nhbrack
