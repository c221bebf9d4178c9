// nhbrack.cpp: command-line entry point for the verification experiments.
#include "nhbrack/config.hpp"
#include "nhbrack/csv.hpp"
#include "nhbrack/errors.hpp"
#include "nhbrack/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

int thread_count(const nhbrack::RunConfig& c, std::optional<int> flag) {
    if (flag) return *flag;
    if (c.threads > 0) return c.threads;
    if (const char* env = std::getenv("NHBRACK_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring NHBRACK_THREADS='" << env << "'\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nhbrack: non-Hamiltonian bracket and quantum-classical Liouville verification experiments"};
    std::string experiment;
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    bool print_config = false;
    app.add_option("experiment", experiment, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(nhbrack::experiment_names()));
    app.add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--threads", threads, "Worker threads (overrides threads and NHBRACK_THREADS)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed (overrides integrator.seed)");
    app.add_flag("--print-config", print_config, "Print the canonical configuration and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    nhbrack::RunConfig cfg;
    try {
        cfg = config_path.empty() ? nhbrack::default_config(experiment) : nhbrack::load_config(config_path, experiment);
        if (out_dir) cfg.output.dir = *out_dir;
        if (seed) cfg.integrator.seed = *seed;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (print_config) {
        std::cout << nhbrack::canonical_config(cfg);
        return 0;
    }
#ifdef _OPENMP
    if (const int t = thread_count(cfg, threads); t > 0) omp_set_num_threads(t);
#else
    (void)thread_count(cfg, threads);
#endif

    try {
        const auto result = nhbrack::run_experiment(cfg);
        nhbrack::print_summary(result, std::cout);
        return result.passed() ? 0 : 1;
    } catch (const nhbrack::OutputError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
