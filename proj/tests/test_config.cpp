// test_config.cpp: run configuration parsing and experiment plumbing.
#include "nhbrack/config.hpp"
#include "nhbrack/csv.hpp"
#include "nhbrack/experiments.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nhbrack;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("nhbrack_test_" + name);
    std::filesystem::remove_all(p);
    return p.string();
}

std::string error_of(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("canonical form round-trips for every experiment") {
        for (const auto& name : experiment_names()) {
            const RunConfig c = default_config(name);
            const std::string text = canonical_config(c);
            const RunConfig back = parse_config(json::parse(text));
            CHECK(canonical_config(back) == text);
            CHECK(back.integrator.seed == 0);
        }
    }

    TEST_CASE("partial documents are completed with defaults") {
        const json j = json::parse(R"({"experiment": "classical-run", "ensemble": {"kind": "nhc2", "g": 2}})");
        const RunConfig c = parse_config(j);
        CHECK(c.ensemble.kind == Layout::NHC2);
        CHECK(c.ensemble.g.value() == 2.0);
        CHECK(c.integrator.dt == default_config("classical-run").integrator.dt);
        const std::string once = canonical_config(c);
        CHECK(canonical_config(parse_config(json::parse(once))) == once);
        // Keys are sorted in the canonical text.
        CHECK(once.find("\"ensemble\"") < once.find("\"experiment\""));
    }

    TEST_CASE("invalid documents name the offending path") {
        CHECK(error_of(json::parse(R"({"experiment": "classical-run", "ensemble": {"temprature": 1}})")) ==
              "config.ensemble.temprature: unknown key");
        CHECK(error_of(json::parse(R"({"experiment": "classical-run", "integrator": {"dt": "small"}})")) ==
              "config.integrator.dt: wrong type");
        CHECK(error_of(json::parse(R"({"experiment": "classical-run", "integrator": {"dt": -1}})")) ==
              "config.integrator.dt: must be > 0");
        CHECK(error_of(json::parse(R"({"experiment": "fly"})")).rfind("config.experiment:", 0) == 0);
        CHECK(error_of(json::parse(R"({"experiment": "qcle-run", "grid": {"axes": [{"name": "R", "nodes": 4}]}})")) ==
              "config.grid.axes[0].nodes: must be >= 8");
        CHECK(error_of(json::parse(R"({"experiment": "qcle-run", "extra": 1})")) == "config.extra: unknown key");
        CHECK(error_of(json::parse(R"({"ensemble": {}})")) == "config.experiment: missing");
    }

    TEST_CASE("sampling with zero steps reports insufficient samples") {
        RunConfig c = default_config("sample-canonical");
        c.integrator.steps = 0;
        c.output.dir = temp_dir("zero");
        CHECK_THROWS_AS(run_experiment(c), InsufficientSamples);
    }

    TEST_CASE("unwritable output directories are reported") {
        RunConfig c = default_config("jacobi-check");
        c.output.dir = "/proc/nhbrack_cannot_write_here";
        CHECK_THROWS_AS(run_experiment(c), OutputError);
        CHECK_THROWS_AS(CsvWriter("/proc/nhbrack_x.csv", {"t"}), OutputError);
    }

    TEST_CASE("classical runs are byte-identical across repeats") {
        RunConfig c = default_config("classical-run");
        c.integrator.steps = 2000;
        c.integrator.stride = 10;
        c.output.dir = temp_dir("det_a");
        const auto r1 = run_experiment(c);
        CHECK(r1.passed());
        const std::string a = slurp(c.output.dir + "/trajectory.csv");
        const std::string ea = slurp(c.output.dir + "/energy.csv");
        c.output.dir = temp_dir("det_b");
        run_experiment(c);
        CHECK(a == slurp(c.output.dir + "/trajectory.csv"));
        CHECK(ea == slurp(c.output.dir + "/energy.csv"));
        CHECK(a.rfind("t,R,eta,P,p_eta,H,w\n", 0) == 0);
        CHECK(ea.rfind("t,H\n", 0) == 0);
    }

    TEST_CASE("jacobi-check passes with its defaults") {
        RunConfig c = default_config("jacobi-check");
        c.output.dir = temp_dir("jacobi");
        const auto r = run_experiment(c);
        CHECK(r.passed());
        bool found = false;
        for (const auto& ch : r.checks) found = found || ch.name == "qc-jacobi-nonzero";
        CHECK(found);
    }

    TEST_CASE("qcle-run writes the documented artifacts") {
        RunConfig c = default_config("qcle-run");
        c.grid.axes = {{"R", -6, 6, 24, Boundary::Truncated}, {"P", -6, 6, 24, Boundary::Truncated}};
        c.integrator.steps = 20;
        c.output.dir = temp_dir("qcle");
        const auto r = run_experiment(c);
        CHECK(r.passed());
        CHECK(slurp(c.output.dir + "/diagnostics.csv").rfind("t,trace,herm_drift,energy\n", 0) == 0);
        CHECK(slurp(c.output.dir + "/snapshot_final.csv").rfind("R,P,rho_11,rho_22,re_rho_12,im_rho_12\n", 0) == 0);
    }

    TEST_CASE("sample-canonical histogram has the reference column") {
        RunConfig c = default_config("sample-canonical");
        c.integrator.steps = 20000;
        c.integrator.burn_in = 100;
        c.output.dir = temp_dir("hist");
        run_experiment(c);
        CHECK(slurp(c.output.dir + "/p_marginal.csv").rfind("p,density,canonical_reference\n", 0) == 0);
    }
}
