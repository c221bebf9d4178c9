// config.cpp: strict JSON parsing and canonical serialization of run configurations.
#include "nhbrack/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace nhbrack {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(path_ + "." + key, "wrong type");
        }
    }

    void get_positive(const std::string& key, double& out) {
        get(key, out);
        if (!(out > 0.0)) fail(path_ + "." + key, "must be > 0");
    }

    // Calls f(Reader&) for a nested object when present.
    template <class F>
    void object(const std::string& key, F f) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        Reader sub(j_.at(key), path_ + "." + key);
        f(sub);
        sub.finish();
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }
    const std::string& path() const { return path_; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail(path_ + "." + it.key(), "unknown key");
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
        throw ConfigError(path + ": " + msg);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require_one_of(const std::string& path, const std::string& v, std::initializer_list<const char*> options) {
    for (const char* o : options) {
        if (v == o) return;
    }
    std::string list;
    for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
    Reader::fail(path, "'" + v + "' is not one of " + list);
}

std::string boundary_name(Boundary b) { return b == Boundary::Periodic ? "periodic" : "truncated"; }

std::vector<GridAxis> axes(std::initializer_list<GridAxis> a) { return a; }

}  // namespace

QuantumModel ModelConfig::build() const {
    if (kind == "linear_vibronic") return QuantumModel::linear_vibronic(n, a, delta, k);
    if (kind == "spin_boson") return QuantumModel::spin_boson(epsilon, a, delta, k);
    if (kind == "diagonal") return QuantumModel::diagonal(n, a, delta, k);
    throw ConfigError("config.model.kind: unknown model '" + kind + "'");
}

Potential PotentialConfig::build(const ModelConfig& model) const {
    if (kind == "harmonic") return Potential::harmonic(k);
    if (kind == "quartic") return Potential::quartic(k, lambda);
    if (kind == "surface") return surface_potential(model.build(), surface);
    throw ConfigError("config.potential.kind: unknown potential '" + kind + "'");
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"classical-run",    "sample-canonical", "qcle-run",
                                                "stationary-check", "jacobi-check",     "bracket-verify"};
    return names;
}

RunConfig default_config(const std::string& experiment) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end()) {
        throw ConfigError("config.experiment: unknown experiment '" + experiment + "'");
    }
    RunConfig c;
    c.experiment = experiment;
    if (experiment == "classical-run") {
        c.ensemble.kind = Layout::Nose;
        c.potential = {"quartic", 1.0, 0.1, 0};
        c.initial.state = {1.0, 0.0, 0.5, 0.0};
        c.integrator = {1e-3, 100000, 100, 0, 0};
    } else if (experiment == "sample-canonical") {
        c.ensemble.kind = Layout::NHC2;
        c.integrator = {0.01, 2000000, 1, 0, 10000};
    } else if (experiment == "qcle-run") {
        c.ensemble.kind = Layout::NVE;
        c.model = {"linear_vibronic", 2, 0.5, 1.0, 1.0, 0.0};
        c.grid.axes = axes({{"R", -7.0, 7.0, 64, Boundary::Truncated}, {"P", -7.0, 7.0, 64, Boundary::Truncated}});
        c.initial.r0 = 2.0;
        c.initial.sigma_r = 0.6;
        c.initial.sigma_p = 0.6;
        c.integrator = {0.01, 300, 10, 0, 0};
    } else if (experiment == "stationary-check") {
        c.ensemble.kind = Layout::NHC2;
        c.model = {"linear_vibronic", 2, 0.5, 1.0, 1.0, 0.0};
        c.quantum.hbar = 0.2;
    } else if (experiment == "jacobi-check") {
        c.grid.axes = axes({{"R", -2.0, 2.0, 24, Boundary::Truncated}, {"P", -2.0, 2.0, 24, Boundary::Truncated}});
    } else if (experiment == "bracket-verify") {
        c.potential = {"quartic", 1.0, 0.1, 0};
        c.integrator = {1e-3, 20000, 1000, 0, 0};
    }
    return c;
}

RunConfig parse_config(const json& j, const std::string& experiment) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    std::string name = experiment;
    if (j.contains("experiment")) {
        if (!j.at("experiment").is_string()) throw ConfigError("config.experiment: wrong type");
        name = j.at("experiment").get<std::string>();
        if (!experiment.empty() && experiment != name) {
            throw ConfigError("config.experiment: file names '" + name + "' but '" + experiment + "' was requested");
        }
    }
    if (name.empty()) throw ConfigError("config.experiment: missing");
    RunConfig c = default_config(name);

    Reader r(j, "config");
    r.get("experiment", c.experiment);
    r.object("model", [&](Reader& m) {
        m.get("kind", c.model.kind);
        require_one_of(m.path() + ".kind", c.model.kind, {"linear_vibronic", "spin_boson", "diagonal"});
        m.get("n", c.model.n);
        if (c.model.n < 1) Reader::fail(m.path() + ".n", "must be >= 1");
        m.get("a", c.model.a);
        m.get("delta", c.model.delta);
        m.get("k", c.model.k);
        m.get("epsilon", c.model.epsilon);
    });
    r.object("potential", [&](Reader& p) {
        p.get("kind", c.potential.kind);
        require_one_of(p.path() + ".kind", c.potential.kind, {"harmonic", "quartic", "surface"});
        p.get("k", c.potential.k);
        p.get("lambda", c.potential.lambda);
        p.get("surface", c.potential.surface);
    });
    r.object("ensemble", [&](Reader& e) {
        auto& s = c.ensemble;
        std::string kind(to_string(s.kind));
        e.get("kind", kind);
        try {
            s.kind = layout_from_string(kind);
        } catch (const std::exception&) {
            Reader::fail(e.path() + ".kind", "'" + kind + "' is not one of nve, nose, nhc2, npt");
        }
        e.get("n_phys", s.n_phys);
        if (s.n_phys < 1) Reader::fail(e.path() + ".n_phys", "must be >= 1");
        e.get_positive("temperature", s.temperature);
        e.get_positive("k_b", s.k_b);
        if (e.has("g")) {
            const json& g = e.raw("g");
            if (g.is_null()) {
                s.g.reset();
            } else if (g.is_number()) {
                s.g = g.get<double>();
                if (!(*s.g > 0.0)) Reader::fail(e.path() + ".g", "must be > 0");
            } else {
                Reader::fail(e.path() + ".g", "wrong type");
            }
        }
        e.get_positive("mass", s.mass);
        e.get_positive("m_eta", s.m_eta);
        e.get_positive("m_eta1", s.m_eta1);
        e.get_positive("m_eta2", s.m_eta2);
        e.get_positive("m_v", s.m_v);
        e.get("p_ext", s.p_ext);
        e.get("decouple_thermostat", s.decouple_thermostat);
    });
    r.object("grid", [&](Reader& g) {
        if (g.has("axes")) {
            const json& list = g.raw("axes");
            if (!list.is_array()) Reader::fail(g.path() + ".axes", "expected an array");
            c.grid.axes.clear();
            for (std::size_t i = 0; i < list.size(); ++i) {
                Reader a(list[i], g.path() + ".axes[" + std::to_string(i) + "]");
                GridAxis ax;
                a.get("name", ax.name);
                a.get("min", ax.min);
                a.get("max", ax.max);
                a.get("nodes", ax.nodes);
                std::string b = "truncated";
                a.get("boundary", b);
                require_one_of(a.path() + ".boundary", b, {"truncated", "periodic"});
                ax.boundary = b == "periodic" ? Boundary::Periodic : Boundary::Truncated;
                if (!(ax.max > ax.min)) Reader::fail(a.path(), "max must exceed min");
                if (ax.nodes < 8) Reader::fail(a.path() + ".nodes", "must be >= 8");
                a.finish();
                c.grid.axes.push_back(ax);
            }
        }
        g.get("flow", c.grid.flow);
        require_one_of(g.path() + ".flow", c.grid.flow, {"upwind3", "central4", "spectral"});
        g.get("jump", c.grid.jump);
        require_one_of(g.path() + ".jump", c.grid.jump, {"central4", "spectral"});
    });
    r.object("initial", [&](Reader& i) {
        i.get("state", c.initial.state);
        i.get("r0", c.initial.r0);
        i.get("p0", c.initial.p0);
        i.get_positive("sigma_r", c.initial.sigma_r);
        i.get_positive("sigma_p", c.initial.sigma_p);
        i.get("surface", c.initial.surface);
        i.get("coherence", c.initial.coherence);
    });
    r.object("quantum", [&](Reader& q) {
        q.get_positive("hbar", c.quantum.hbar);
        q.get("frozen", c.quantum.frozen);
    });
    r.object("stationary", [&](Reader& s) {
        s.get_positive("sigma_E", c.stationary.sigma_E);
        s.get("sigma_E_series", c.stationary.sigma_E_series);
        s.get("hbar_series", c.stationary.hbar_series);
        s.get("C", c.stationary.C);
        for (double v : c.stationary.sigma_E_series) {
            if (!(v > 0.0)) Reader::fail(s.path() + ".sigma_E_series", "entries must be > 0");
        }
        for (double v : c.stationary.hbar_series) {
            if (!(v > 0.0)) Reader::fail(s.path() + ".hbar_series", "entries must be > 0");
        }
    });
    r.object("integrator", [&](Reader& i) {
        i.get_positive("dt", c.integrator.dt);
        i.get("steps", c.integrator.steps);
        i.get("stride", c.integrator.stride);
        if (c.integrator.stride < 1) Reader::fail(i.path() + ".stride", "must be >= 1");
        i.get("seed", c.integrator.seed);
        i.get("burn_in", c.integrator.burn_in);
    });
    r.object("sampling", [&](Reader& s) {
        s.get("bins", c.sampling.bins);
        if (c.sampling.bins < 2) Reader::fail(s.path() + ".bins", "must be >= 2");
        s.get_positive("p_range", c.sampling.p_range);
    });
    r.object("output", [&](Reader& o) {
        o.get("dir", c.output.dir);
        if (c.output.dir.empty()) Reader::fail(o.path() + ".dir", "must not be empty");
    });
    r.get("threads", c.threads);
    if (c.threads < 0) Reader::fail("config.threads", "must be >= 0");
    r.finish();
    return c;
}

RunConfig load_config(const std::string& path, const std::string& experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j, experiment);
}

json to_json(const RunConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["model"] = {{"kind", c.model.kind}, {"n", c.model.n},         {"a", c.model.a},
                  {"delta", c.model.delta}, {"k", c.model.k}, {"epsilon", c.model.epsilon}};
    j["potential"] = {{"kind", c.potential.kind},
                      {"k", c.potential.k},
                      {"lambda", c.potential.lambda},
                      {"surface", c.potential.surface}};
    const auto& e = c.ensemble;
    j["ensemble"] = {{"kind", std::string(to_string(e.kind))},
                     {"n_phys", e.n_phys},
                     {"temperature", e.temperature},
                     {"k_b", e.k_b},
                     {"g", e.g ? json(*e.g) : json(nullptr)},
                     {"mass", e.mass},
                     {"m_eta", e.m_eta},
                     {"m_eta1", e.m_eta1},
                     {"m_eta2", e.m_eta2},
                     {"m_v", e.m_v},
                     {"p_ext", e.p_ext},
                     {"decouple_thermostat", e.decouple_thermostat}};
    json ax = json::array();
    for (const auto& a : c.grid.axes) {
        ax.push_back({{"name", a.name},
                      {"min", a.min},
                      {"max", a.max},
                      {"nodes", a.nodes},
                      {"boundary", boundary_name(a.boundary)}});
    }
    j["grid"] = {{"axes", ax}, {"flow", c.grid.flow}, {"jump", c.grid.jump}};
    j["initial"] = {{"state", c.initial.state},     {"r0", c.initial.r0},
                    {"p0", c.initial.p0},           {"sigma_r", c.initial.sigma_r},
                    {"sigma_p", c.initial.sigma_p}, {"surface", c.initial.surface},
                    {"coherence", c.initial.coherence}};
    j["quantum"] = {{"hbar", c.quantum.hbar}, {"frozen", c.quantum.frozen}};
    j["stationary"] = {{"sigma_E", c.stationary.sigma_E},
                       {"sigma_E_series", c.stationary.sigma_E_series},
                       {"hbar_series", c.stationary.hbar_series},
                       {"C", c.stationary.C}};
    j["integrator"] = {{"dt", c.integrator.dt},
                       {"steps", c.integrator.steps},
                       {"stride", c.integrator.stride},
                       {"seed", c.integrator.seed},
                       {"burn_in", c.integrator.burn_in}};
    j["sampling"] = {{"bins", c.sampling.bins}, {"p_range", c.sampling.p_range}};
    j["output"] = {{"dir", c.output.dir}};
    j["threads"] = c.threads;
    return j;
}

std::string canonical_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace nhbrack
