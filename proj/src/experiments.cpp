// experiments.cpp: verification experiments behind the nhbrack CLI.
#include "nhbrack/experiments.hpp"

#include "nhbrack/csv.hpp"
#include "nhbrack/errors.hpp"
#include "nhbrack/integrator.hpp"
#include "nhbrack/operator_algebra.hpp"
#include "nhbrack/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace nhbrack {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string prepare_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw OutputError("cannot create output directory '" + dir + "'");
    return dir;
}

std::string path_in(const RunConfig& c, const std::string& file) {
    return (std::filesystem::path(c.output.dir) / file).string();
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw OutputError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw OutputError("write to '" + path + "' failed");
}

bool thermostatted_for_stationary(Layout k) { return k == Layout::Nose || k == Layout::NHC2; }

// ------------------------------------------------------------ classical-run

ExperimentResult run_classical(const RunConfig& c) {
    ExperimentResult r;
    const EnsembleSpec& spec = c.ensemble;
    spec.validate();
    const Potential phi = c.potential.build(c.model);
    const PhasePoint x0(spec.kind, spec.n_phys, initial_state(c));
    const auto rec = integrate(make_structure(spec), make_energy(spec, phi), x0, c.integrator.dt,
                               static_cast<std::size_t>(c.integrator.steps),
                               static_cast<std::size_t>(c.integrator.stride));
    const std::string traj = path_in(c, "trajectory.csv");
    write_trajectory_csv(rec, traj);
    const std::string energy = path_in(c, "energy.csv");
    {
        CsvWriter w(energy, {"t", "H"});
        for (std::size_t i = 0; i < rec.size(); ++i) w.row({rec.times[i], rec.energy[i]});
    }
    r.artifacts = {traj, energy};

    const double drift = rec.max_relative_energy_drift();
    r.add("energy-conservation", drift <= 1e-8, "max relative drift " + fmt(drift));
    if (spec.kind == Layout::Nose) {
        // w - w0 = -N (eta - eta0) along the flow.
        const int ie = spec.index().eta();
        double worst = 0.0;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const double lhs = rec.weight[i] - rec.weight[0];
            const double rhs = -spec.n_phys * (rec.states[i][ie] - rec.states[0][ie]);
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
        }
        r.add("weight-eta-lock", worst <= 1e-6, "max deviation " + fmt(worst));
    }
    return r;
}

// --------------------------------------------------------- sample-canonical

ExperimentResult run_sampling(const RunConfig& c) {
    ExperimentResult r;
    const EnsembleSpec& spec = c.ensemble;
    spec.validate();
    if (c.integrator.steps == 0 || c.integrator.steps <= c.integrator.burn_in) {
        throw InsufficientSamples("insufficient samples: steps = " + std::to_string(c.integrator.steps) +
                                  ", burn_in = " + std::to_string(c.integrator.burn_in));
    }
    Eigen::VectorXd x = initial_state(c);
    if (c.integrator.seed != 0) {
        std::mt19937_64 rng(c.integrator.seed);
        std::normal_distribution<double> jitter(0.0, 0.1);
        const LayoutIndex ix = spec.index();
        for (int k = 0; k < spec.n_phys; ++k) x[ix.p(k)] += jitter(rng);
    }
    SamplingOptions opt;
    opt.dt = c.integrator.dt;
    opt.steps = static_cast<std::size_t>(c.integrator.steps);
    opt.burn_in = static_cast<std::size_t>(c.integrator.burn_in);
    opt.bins = static_cast<std::size_t>(c.sampling.bins);
    opt.p_range = c.sampling.p_range;
    const auto sample = sample_canonical(spec, c.potential.build(c.model), PhasePoint(spec.kind, spec.n_phys, x), opt);
    r.warnings = sample.warnings;
    if (sample.samples == 0) throw InsufficientSamples("insufficient samples: no samples after burn-in");

    const double sigma = std::sqrt(spec.mass * spec.kT() * spec.g_eff() / spec.n_phys);
    const std::string hist = path_in(c, "p_marginal.csv");
    {
        CsvWriter w(hist, {"p", "density", "canonical_reference"});
        const auto dens = sample.p.density();
        for (std::size_t i = 0; i < sample.p.bins(); ++i) {
            const double p = sample.p.center(i);
            const double ref = std::exp(-0.5 * p * p / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
            w.row({p, dens[i], ref});
        }
    }
    r.artifacts = {hist};

    const double ks = ks_distance_gaussian(sample.p, sigma);
    r.add("p-marginal-ks", ks < 0.02, "KS " + fmt(ks) + " vs N(0, " + fmt(sigma * sigma) + ")");
    const LineFit fit = fit_momentum_log_slope(sample.p, spec.mass);
    const double expected = -spec.beta() * spec.n_phys / spec.g_eff();
    const double rel = std::abs(fit.slope - expected) / std::abs(expected);
    r.add("inverse-temperature-slope", rel <= 0.05,
          "slope " + fmt(fit.slope) + ", expected " + fmt(expected) + " (rel " + fmt(rel) + ")");
    return r;
}

// ------------------------------------------------------------------ qcle-run

ExperimentResult run_qcle(const RunConfig& c) {
    ExperimentResult r;
    const EnsembleSpec& spec = c.ensemble;
    spec.validate();
    if (c.grid.axes.empty()) throw ConfigError("config.grid.axes: qcle-run needs grid axes");
    auto grid = make_layout_grid(spec, c.grid.axes);
    const QuantumModel model = c.model.build();
    const FrameField frames = FrameField::build(model, grid->axis(spec.index().r(0)), c.quantum.hbar);
    LiouvillianOptions o;
    o.flow = c.grid.flow == "spectral" ? FlowScheme::Spectral
             : c.grid.flow == "central4" ? FlowScheme::Central4
                                         : FlowScheme::Upwind3;
    o.jump = c.grid.jump == "spectral" ? JumpScheme::Spectral : JumpScheme::Central4;
    o.frozen = c.quantum.frozen;
    const LiouvillianOp op = build_liouvillian(frames, spec, grid, Side::Density, o);
    r.warnings = op.warnings();
    if (c.initial.surface < 0 || c.initial.surface >= model.n) {
        throw ConfigError("config.initial.surface: out of range for an " + std::to_string(model.n) + "-state model");
    }
    const DensityField rho0 = gaussian_density(grid, spec, model.n, c.initial);
    const auto res = propagate(op, rho0, c.integrator.dt, static_cast<std::size_t>(c.integrator.steps),
                               static_cast<std::size_t>(c.integrator.stride));

    const std::string diag = path_in(c, "diagnostics.csv");
    write_diagnostics_csv(res.diagnostics, diag);
    const std::string snap0 = path_in(c, "snapshot_initial.csv");
    const std::string snap1 = path_in(c, "snapshot_final.csv");
    write_snapshot_csv(rho0, snap0);
    write_snapshot_csv(res.field, snap1);
    r.artifacts = {diag, snap0, snap1};

    double trace_drift = 0.0, herm = 0.0;
    for (const auto& row : res.diagnostics) {
        trace_drift = std::max(trace_drift, std::abs(row.trace - res.diagnostics.front().trace));
        herm = std::max(herm, row.herm_drift);
    }
    r.add("trace-conservation", trace_drift <= 1e-4, "max |trace - trace0| " + fmt(trace_drift));
    r.add("hermiticity", herm <= 1e-8, "max hermiticity drift " + fmt(herm));
    return r;
}

// ---------------------------------------------------------- stationary-check

ExperimentResult run_stationary(const RunConfig& c) {
    ExperimentResult r;
    StationaryCheckOptions o;
    o.ensemble = c.ensemble;
    o.model = c.model;
    o.hbar = c.quantum.hbar;
    o.hbar_series = c.stationary.hbar_series;
    o.C = c.stationary.C;
    o.sigma_E = c.stationary.sigma_E;
    o.sigma_E_series = c.stationary.sigma_E_series;
    const StationaryCheckResult s = stationary_check(o);
    r.warnings = s.warnings;
    const std::string report = path_in(c, "stationary_report.json");
    write_json(s.report(), report);
    r.artifacts = {report};

    r.add("order0-residual", s.order0_decoupled <= 1e-4, "d == 0 residual " + fmt(s.order0_decoupled));
    r.add("kappa-required", s.no_kappa_residual > 10.0 * s.order0_decoupled,
          "residual without kappa " + fmt(s.no_kappa_residual));
    double ratio_at = 0.0;
    bool monotone = true;
    std::vector<HbarRow> rows = s.hbar_rows;
    std::sort(rows.begin(), rows.end(), [](const HbarRow& a, const HbarRow& b) { return a.hbar > b.hbar; });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].hbar == o.hbar) ratio_at = rows[i].ratio();
        if (i > 0 && !(rows[i].ratio() > rows[i - 1].ratio())) monotone = false;
    }
    r.add("order1-improvement", ratio_at >= 1.4, "residual ratio " + fmt(ratio_at) + " at hbar " + fmt(o.hbar));
    r.add("order1-monotone", monotone, "ratio grows as hbar decreases over " + std::to_string(rows.size()) + " values");
    r.add("recursion-consistency", s.recursion_max <= 1e-8, "max node difference " + fmt(s.recursion_max));
    r.add("fredholm-parity", s.fredholm_max <= 1e-8, "max " + fmt(s.fredholm_max));
    r.add("fredholm-control", s.fredholm_control > 1e-6, "parity-violating control " + fmt(s.fredholm_control));
    const auto slope_ok = [](double got, double want) { return std::abs(got - want) <= 1e-3 * std::abs(want); };
    r.add("marginal-g-n", slope_ok(s.marginal_slope, s.marginal_expected) && s.marginal_fit_residual <= 1e-6,
          "slope " + fmt(s.marginal_slope) + " expected " + fmt(s.marginal_expected) + ", fit residual " +
              fmt(s.marginal_fit_residual));
    r.add("marginal-g-2n", slope_ok(s.marginal_slope_2n, s.marginal_expected_2n) && s.marginal_fit_residual_2n <= 1e-6,
          "slope " + fmt(s.marginal_slope_2n) + " expected " + fmt(s.marginal_expected_2n) + ", fit residual " +
              fmt(s.marginal_fit_residual_2n));
    r.add("weight-sign", s.sign.chosen == -1 && s.sign.consistent,
          "residual(-) " + fmt(s.sign.residual_minus) + ", residual(+) " + fmt(s.sign.residual_plus));
    r.add("hermiticity", s.hermiticity <= 1e-12, "rho0 + hbar rho1 defect " + fmt(s.hermiticity));
    return r;
}

// -------------------------------------------------------------- jacobi-check

CMatrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
    }
    return m;
}

ExperimentResult run_jacobi(const RunConfig& c) {
    ExperimentResult r;
    std::mt19937_64 rng(c.integrator.seed);
    double form = 0.0, jac = 0.0;
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 4;
        const CMatrix a = random_matrix(rng, n), b = random_matrix(rng, n), d = random_matrix(rng, n);
        form = std::max(form, (commutator_matrix_form(a, b) - (a * b - b * a)).cwiseAbs().maxCoeff());
        const CMatrix j = commutator_matrix_form(a, commutator_matrix_form(b, d)) +
                          commutator_matrix_form(d, commutator_matrix_form(a, b)) +
                          commutator_matrix_form(b, commutator_matrix_form(d, a));
        jac = std::max(jac, j.cwiseAbs().maxCoeff());
    }
    r.add("commutator-matrix-form", form <= 1e-14, "max |form - (ab - ba)| " + fmt(form));
    r.add("commutator-jacobi", jac <= 1e-13, "max residual " + fmt(jac));

    EnsembleSpec nve;
    nve.kind = Layout::NVE;
    if (c.grid.axes.empty()) throw ConfigError("config.grid.axes: jacobi-check needs grid axes");
    auto grid = make_layout_grid(nve, c.grid.axes);
    DMatrixSpec spec;
    spec.kind = DKind::QuantumClassical;
    spec.structure = BracketStructure::symplectic(1);
    spec.hbar = c.quantum.hbar;
    const CMatrix I2 = CMatrix::Identity(2, 2);
    const CMatrix sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
    auto field = [&](std::function<CMatrix(double, double)> f) {
        return OperatorField::on_grid(grid, 2, [f](const Eigen::VectorXd& x) { return f(x[0], x[1]); });
    };
    const auto c1 = field([&](double, double) { return CMatrix(sx); });
    const auto c2 = field([&](double, double) { return CMatrix(sy); });
    const auto c3 = field([&](double, double) { return CMatrix(0.3 * sz + 0.2 * sx); });
    const auto s1 = field([&](double R, double P) { return CMatrix((R * R * P) * I2); });
    const auto s2 = field([&](double R, double P) { return CMatrix((P * P + R) * I2); });
    const auto s3 = field([&](double R, double P) { return CMatrix((R * P) * I2); });
    const auto constant = qc_jacobi_residual(c1, c2, c3, spec);
    const auto scalar = qc_jacobi_residual(s1, s2, s3, spec);
    const double floor = std::max({constant.residual_max, scalar.residual_max, 1e-14});
    r.add("qc-jacobi-constant", constant.residual_max <= 1e-8, "residual " + fmt(constant.residual_max));
    r.add("qc-jacobi-scalar", scalar.residual_max <= 1e-8, "residual " + fmt(scalar.residual_max));

    const auto a = field([&](double R, double) { return CMatrix(R * sx); });
    const auto b = field([&](double, double P) { return CMatrix(P * sy); });
    const auto d = field([&](double R, double P) { return CMatrix(R * P * sy); });
    const auto generic = qc_jacobi_residual(a, b, d, spec);
    r.add("qc-jacobi-nonzero", generic.residual_max >= 10.0 * floor,
          "residual " + fmt(generic.residual_max) + ", noise floor " + fmt(floor));
    r.add("qc-jacobi-twelve-term", generic.difference_max <= 1e-8 * std::max(1.0, generic.residual_max),
          "nested vs twelve-term difference " + fmt(generic.difference_max));

    const std::string out = path_in(c, "jacobi.json");
    write_json({{"commutator_matrix_form", form},
                {"commutator_jacobi", jac},
                {"qc_constant", constant.residual_max},
                {"qc_scalar", scalar.residual_max},
                {"qc_generic", generic.residual_max},
                {"qc_twelve_term", generic.twelve_term_max},
                {"qc_difference", generic.difference_max}},
               out);
    r.artifacts = {out};
    return r;
}

// ------------------------------------------------------------ bracket-verify

// NPT equations of motion written out term by term.
Eigen::VectorXd npt_closed_form(const EnsembleSpec& s, const Potential& phi, const Eigen::VectorXd& x) {
    const LayoutIndex ix = s.index();
    const int N = s.n_phys;
    const double V = x[ix.volume()], pe = x[ix.p_eta()], pv = x[ix.p_volume()];
    const Eigen::VectorXd R = x.segment(0, N), P = x.segment(ix.p(0), N);
    const Eigen::VectorXd dphi = phi.gradient(R);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    const double p2 = P.squaredNorm() / s.mass;
    const double virial = R.dot(dphi);
    for (int k = 0; k < N; ++k) {
        out[ix.r(k)] = P[k] / s.mass + R[k] * pv / (3.0 * V * s.m_v);
        out[ix.p(k)] = -dphi[k] - P[k] * pe / s.m_eta - P[k] * pv / (3.0 * V * s.m_v);
    }
    out[ix.eta()] = pe / s.m_eta;
    out[ix.volume()] = pv / s.m_v;
    out[ix.p_eta()] = p2 + pv * pv / s.m_v - s.g_eff() * s.kT();
    out[ix.p_volume()] = (p2 - virial) / (3.0 * V) - s.p_ext - pv * pe / s.m_eta;
    return out;
}

ExperimentResult run_bracket_verify(const RunConfig& c) {
    ExperimentResult r;
    std::mt19937_64 rng(c.integrator.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Potential phi = c.potential.build(c.model);
    json out = json::object();
    for (Layout kind : {Layout::Nose, Layout::NHC2, Layout::NPT}) {
        EnsembleSpec spec = c.ensemble;
        spec.kind = kind;
        spec.validate();
        const std::string tag(to_string(kind));
        const BracketStructure s = make_structure(spec);
        const GeneralizedEnergy h = make_energy(spec, phi);
        const LayoutIndex ix = spec.index();
        double anti = 0.0, div = 0.0, kap = 0.0;
        for (int t = 0; t < 100; ++t) {
            Eigen::VectorXd x(spec.dim());
            for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
            if (kind == Layout::NPT) x[ix.volume()] = 1.5 + 0.5 * u(rng);
            const Eigen::MatrixXd b = s.matrix(x);
            anti = std::max(anti, (b + b.transpose()).cwiseAbs().maxCoeff());
            div = std::max(div, (s.divergence(x) - s.divergence_fd(x)).cwiseAbs().maxCoeff());
            kap = std::max(kap, std::abs(compressibility(s, h, x) - kappa_closed_form(spec, x)));
        }
        r.add(tag + "-antisymmetry", anti == 0.0, "max |B + B^T| " + fmt(anti));
        r.add(tag + "-divergence", div <= 1e-6, "analytic vs finite difference " + fmt(div));
        r.add(tag + "-compressibility", kap <= 1e-10, "divergence vs closed form " + fmt(kap));

        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(spec.dim());
        x0[ix.r(0)] = 1.0;
        x0[ix.p(0)] = 0.5;
        if (kind == Layout::NPT) x0[ix.volume()] = 1.0;
        const auto rec = integrate(s, h, PhasePoint(kind, spec.n_phys, x0), c.integrator.dt,
                                   static_cast<std::size_t>(c.integrator.steps),
                                   static_cast<std::size_t>(c.integrator.stride));
        const double drift = rec.max_relative_energy_drift();
        r.add(tag + "-energy-conservation", drift <= 1e-8, "max relative drift " + fmt(drift));
        out[tag] = {{"antisymmetry", anti}, {"divergence_fd", div}, {"kappa", kap}, {"energy_drift", drift}};

        if (kind == Layout::NPT) {
            double eom = 0.0;
            for (int t = 0; t < 100; ++t) {
                Eigen::VectorXd x(spec.dim());
                for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
                x[ix.volume()] = 1.5 + 0.5 * u(rng);
                eom = std::max(eom, (eom_rhs(s, h, x) - npt_closed_form(spec, phi, x)).cwiseAbs().maxCoeff());
            }
            r.add("npt-equations", eom <= 1e-12, "max component difference " + fmt(eom));
            out[tag]["equations"] = eom;
        }
        if (kind == Layout::Nose) {
            // {R, {P, p_eta}} + cyclic: B^N violates Jacobi with value -1 for this triple.
            const double j = jacobi_residual_classical(s, ScalarField::coordinate(ix.r(0)),
                                                       ScalarField::coordinate(ix.p(0)),
                                                       ScalarField::coordinate(ix.p_eta()), x0);
            r.add("nose-jacobi-violation", std::abs(j + 1.0) <= 1e-6, "{R,{P,p_eta}} + cyclic = " + fmt(j));
            out[tag]["jacobi_r_p_peta"] = j;
        }
    }
    const std::string path = path_in(c, "bracket_verify.json");
    write_json(out, path);
    r.artifacts = {path};
    return r;
}

double max_abs_diff(const DensityField& a, const DensityField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

}  // namespace

bool ExperimentResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void print_summary(const ExperimentResult& r, std::ostream& out) {
    for (const auto& c : r.checks) out << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
    for (const auto& a : r.artifacts) out << "wrote " << a << "\n";
}

Eigen::VectorXd initial_state(const RunConfig& c) {
    const LayoutIndex ix = c.ensemble.index();
    if (!c.initial.state.empty()) {
        if (static_cast<int>(c.initial.state.size()) != ix.dim()) {
            throw ConfigError("config.initial.state: layout '" + std::string(to_string(ix.layout)) + "' needs " +
                              std::to_string(ix.dim()) + " values");
        }
        return Eigen::Map<const Eigen::VectorXd>(c.initial.state.data(), ix.dim());
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ix.dim());
    for (int k = 0; k < ix.n_phys; ++k) x[ix.r(k)] = 1.0;
    if (ix.layout == Layout::NPT) x[ix.volume()] = 1.0;
    return x;
}

DensityField gaussian_density(std::shared_ptr<const PhaseGrid> grid, const EnsembleSpec& spec, int n,
                              const InitialConfig& init) {
    const LayoutIndex ix = spec.index();
    const int d = grid->dims();
    if (d != ix.dim()) throw StructuralError("grid does not match the ensemble layout");
    DensityField rho(grid, n);
    const int cc = ix.coordinate_count();
    for (std::size_t k = 0; k < grid->size(); ++k) {
        double e = 0.0;
        for (int a = 0; a < d; ++a) {
            const double x = grid->coord(k, a);
            double center = 0.0;
            if (a == ix.r(0)) center = init.r0;
            if (a == ix.p(0)) center = init.p0;
            if (ix.layout == Layout::NPT && a == ix.volume()) center = 0.5 * (grid->axis(a).min + grid->axis(a).max);
            const double s = a < cc ? init.sigma_r : init.sigma_p;
            const double z = (x - center) / s;
            e += 0.5 * z * z;
        }
        const double g = std::exp(-e);
        rho.at(k, init.surface, init.surface) = g;
        for (int b = 0; b < n; ++b) {
            if (b != init.surface) {
                rho.at(k, init.surface, b) = init.coherence * g;
                rho.at(k, b, init.surface) = init.coherence * g;
            }
        }
    }
    rho.normalize();
    return rho;
}

std::vector<GridAxis> stationary_axes(const EnsembleSpec& spec, int r_nodes, double r_half, int p_nodes,
                                      int thermostat_p_nodes, int eta_nodes, double p_sigmas) {
    if (!thermostatted_for_stationary(spec.kind)) {
        throw std::invalid_argument("stationary residual grids need the Nose or NHC2 layout");
    }
    const LayoutIndex ix = spec.index();
    const auto names = ix.names();
    std::vector<GridAxis> axes(static_cast<std::size_t>(ix.dim()));
    for (int a = 0; a < ix.dim(); ++a) {
        GridAxis& g = axes[static_cast<std::size_t>(a)];
        g.name = names[static_cast<std::size_t>(a)];
        g.boundary = Boundary::Periodic;
        double half = 1.0;
        int nodes = eta_nodes;
        if (a == ix.r(0)) {
            half = r_half;
            nodes = r_nodes;
        } else if (a == ix.p(0)) {
            half = p_sigmas * std::sqrt(spec.mass * spec.kT());
            nodes = p_nodes;
        } else if (a >= ix.coordinate_count()) {
            double m = spec.m_eta;
            if (spec.kind == Layout::NHC2) m = a == ix.p_eta(0) ? spec.m_eta1 : spec.m_eta2;
            half = p_sigmas * std::sqrt(m * spec.kT());
            nodes = thermostat_p_nodes;
        }
        g.min = -half;
        g.max = half;
        g.nodes = nodes;
    }
    return axes;
}

json StationaryCheckResult::report() const {
    json hb = json::array();
    for (const auto& h : hbar_rows) {
        hb.push_back({{"hbar", h.hbar}, {"order0_residual", h.order0}, {"order1_residual", h.order1},
                      {"ratio", h.ratio()}});
    }
    json sig = json::array();
    for (const auto& s : sigma_rows) {
        sig.push_back({{"sigma_E", s.sigma_E}, {"marginal_slope", s.slope}, {"marginal_fit_residual", s.fit_residual},
                       {"mean_energy", s.mean_h}});
    }
    return {{"order0_residual", order0_decoupled},
            {"order1_residual", order1_residual},
            {"coupled_order0_residual", order0_residual},
            {"no_kappa_residual", no_kappa_residual},
            {"hbar_series", hb},
            {"marginal_slope", marginal_slope},
            {"marginal_expected_slope", marginal_expected},
            {"marginal_fit_residual", marginal_fit_residual},
            {"marginal_leakage", marginal_leakage},
            {"marginal_slope_g2n", marginal_slope_2n},
            {"marginal_expected_slope_g2n", marginal_expected_2n},
            {"marginal_fit_residual_g2n", marginal_fit_residual_2n},
            {"fredholm_max", fredholm_max},
            {"fredholm_control", fredholm_control},
            {"recursion_max", recursion_max},
            {"hermiticity_defect", hermiticity},
            {"order0_offdiagonal", offdiag_order0},
            {"thermostat_factorization", factorization},
            {"weight_sign",
             {{"chosen", sign.chosen},
              {"residual_minus", sign.residual_minus},
              {"residual_plus", sign.residual_plus},
              {"slope_minus", sign.slope_minus},
              {"slope_plus", sign.slope_plus},
              {"expected_slope", sign.expected_slope}}},
            {"sigma_E_series", sig},
            {"warnings", warnings}};
}

StationaryCheckResult stationary_check(const StationaryCheckOptions& opt) {
    StationaryCheckResult res;
    const EnsembleSpec& spec = opt.ensemble;
    spec.validate();
    if (!thermostatted_for_stationary(spec.kind)) throw ConfigError("config.ensemble.kind: stationary-check needs nose or nhc2");
    if (spec.n_phys != 1) throw ConfigError("config.ensemble.n_phys: stationary-check supports one classical coordinate");
    const QuantumModel coupled = opt.model.build();
    const double kT = spec.kT();
    LiouvillianOptions spectral;
    spectral.flow = FlowScheme::Spectral;
    spectral.jump = JumpScheme::Spectral;

    StationarySpec expo;
    expo.ensemble = spec;
    expo.form = StationaryForm::Exponential;
    expo.hbar = opt.hbar;

    // d == 0 model: parallel uncoupled surfaces.
    {
        const QuantumModel flat = QuantumModel::diagonal(coupled.n, 0.0, opt.model.delta, opt.model.k);
        const double r_half = 5.0 * std::sqrt(kT / opt.model.k);
        auto grid = make_layout_grid(
            spec, stationary_axes(spec, opt.decoupled_r_nodes, r_half, opt.p_nodes, opt.thermostat_p_nodes, opt.eta_nodes));
        const FrameField frames = FrameField::build(flat, grid->axis(0), opt.hbar);
        const auto op = build_liouvillian(frames, spec, grid, Side::Density, spectral);
        const DensityField rho = stationary_rho0(expo, frames, grid);
        res.order0_decoupled = stationarity_residual(rho, op);
        LiouvillianOptions no_kappa = spectral;
        no_kappa.include_kappa = false;
        res.no_kappa_residual = stationarity_residual(rho, build_liouvillian(frames, spec, grid, Side::Density, no_kappa));
    }

    // Coupled model over the hbar series.
    {
        auto grid = make_layout_grid(
            spec, stationary_axes(spec, opt.r_nodes, opt.r_half, opt.p_nodes, opt.thermostat_p_nodes, opt.eta_nodes));
        std::vector<double> hbars = opt.hbar_series;
        if (std::find(hbars.begin(), hbars.end(), opt.hbar) == hbars.end()) hbars.push_back(opt.hbar);
        const FrameField frames = FrameField::build(coupled, grid->axis(0), opt.hbar);
        const DensityField rho0 = stationary_rho0(expo, frames, grid);
        const DensityField rho1 = stationary_rho1(rho0, frames, spec);
        for (double hb : hbars) {
            const FrameField fh = FrameField::build(coupled, grid->axis(0), hb);
            const auto op = build_liouvillian(fh, spec, grid, Side::Density, spectral);
            for (const auto& w : op.warnings()) {
                if (std::find(res.warnings.begin(), res.warnings.end(), w) == res.warnings.end()) res.warnings.push_back(w);
            }
            DensityField rho = rho0;
            rho.axpy(hb, rho1);
            HbarRow row{hb, stationarity_residual(rho0, op), stationarity_residual(rho, op)};
            res.hbar_rows.push_back(row);
            if (hb == opt.hbar) {
                res.order0_residual = row.order0;
                res.order1_residual = row.order1;
                res.hermiticity = rho.hermiticity_defect();
            }
        }
        for (std::size_t k = 0; k < rho0.nodes(); ++k) {
            for (int a = 0; a < rho0.n(); ++a) {
                for (int b = 0; b < rho0.n(); ++b) {
                    if (a != b) res.offdiag_order0 = std::max(res.offdiag_order0, std::abs(rho0.at(k, a, b)));
                }
            }
        }
    }

    // Shell grid for the delta form, Nose layout.
    EnsembleSpec nose = spec;
    nose.kind = Layout::Nose;
    nose.g.reset();
    const GridAxis shell_r{"R", -opt.shell_half, opt.shell_half, opt.shell_r_nodes, Boundary::Truncated};
    const GridAxis shell_p{"P", -opt.shell_half, opt.shell_half, opt.shell_p_nodes, Boundary::Truncated};
    const FrameField shell_frames = FrameField::build(coupled, shell_r, opt.hbar);
    auto marginal = [&](const EnsembleSpec& e, double sigma) {
        StationarySpec s;
        s.ensemble = e;
        s.form = StationaryForm::DeltaShell;
        s.C = opt.C;
        s.sigma_E = sigma;
        s.hbar = opt.hbar;
        auto g = nose_shell_grid(e, shell_frames, shell_r, shell_p, opt.C, sigma, opt.shell_p_eta_nodes);
        return std::make_pair(marginalize_nose(stationary_rho0(s, shell_frames, g), shell_frames, e), g);
    };
    {
        const auto [m, g] = marginal(nose, opt.sigma_E);
        res.marginal_slope = m.slope;
        res.marginal_expected = m.expected_slope;
        res.marginal_fit_residual = m.fit_max;
        res.marginal_leakage = m.leakage;
        for (const auto& w : m.warnings) res.warnings.push_back(w);
        EnsembleSpec two = nose;
        two.g = 2.0 * nose.n_phys;
        const auto m2 = marginal(two, opt.sigma_E).first;
        res.marginal_slope_2n = m2.slope;
        res.marginal_expected_2n = m2.expected_slope;
        res.marginal_fit_residual_2n = m2.fit_max;
        for (const auto& w : m2.warnings) res.warnings.push_back(w);
    }
    for (double sigma : opt.sigma_E_series) {
        const auto m = marginal(nose, sigma).first;
        double num = 0.0, den = 0.0;
        const std::size_t plane = static_cast<std::size_t>(m.r_nodes * m.p_nodes);
        for (std::size_t i = 0; i < m.reduced.size(); ++i) {
            const std::size_t ij = i % plane;
            const double w = shell_r.weight(static_cast<int>(ij) / m.p_nodes) * shell_p.weight(static_cast<int>(ij) % m.p_nodes);
            num += w * m.reduced[i] * m.h_t[i];
            den += w * m.reduced[i];
        }
        res.sigma_rows.push_back({sigma, m.slope, m.fit_max, num / den});
    }

    // Recursion, Fredholm and sign checks on a Nose exponential grid.
    {
        auto grid = make_layout_grid(
            nose, stationary_axes(nose, opt.r_nodes, opt.r_half, opt.recursion_p_nodes, opt.thermostat_p_nodes,
                                  opt.eta_nodes, opt.recursion_p_half / std::sqrt(nose.mass * nose.kT())));
        const FrameField frames = FrameField::build(coupled, grid->axis(0), opt.hbar);
        const auto op = build_liouvillian(frames, nose, grid, Side::Density, spectral);
        StationarySpec e = expo;
        e.ensemble = nose;
        const DensityField rho0 = stationary_rho0(e, frames, grid);
        const DensityField closed = stationary_rho1(rho0, frames, nose);
        const DensityField recursion = rho1_from_recursion(rho0, op);
        res.recursion_max = max_abs_diff(closed, recursion);
        res.fredholm_max = fredholm_check(closed, op).max_abs;
        res.fredholm_control = fredholm_check(parity_violating_control(rho0, nose), op).max_abs;

        // rho1^{ab} / rho0^{bb} must not depend on (eta, p_eta).
        const PhaseGrid& g = *grid;
        const LayoutIndex ix = nose.index();
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.index_along(k, ix.eta()) != 0 || g.index_along(k, ix.p_eta()) != 0) continue;
            for (int ie = 0; ie < g.axis(ix.eta()).nodes; ++ie) {
                for (int iq = 0; iq < g.axis(ix.p_eta()).nodes; ++iq) {
                    const std::size_t k2 = k + static_cast<std::size_t>(ie) * g.stride(ix.eta()) +
                                           static_cast<std::size_t>(iq) * g.stride(ix.p_eta());
                    for (int a = 0; a < rho0.n(); ++a) {
                        for (int b = 0; b < rho0.n(); ++b) {
                            if (a == b || rho0.at(k, b, b) == 0.0 || rho0.at(k2, b, b) == 0.0) continue;
                            const cplx r1 = closed.at(k, a, b) / rho0.at(k, b, b);
                            const cplx r2 = closed.at(k2, a, b) / rho0.at(k2, b, b);
                            res.factorization = std::max(res.factorization, std::abs(r1 - r2));
                        }
                    }
                }
            }
        }

        StationarySpec shell;
        shell.ensemble = nose;
        shell.form = StationaryForm::DeltaShell;
        shell.C = opt.C;
        shell.sigma_E = opt.sigma_E;
        shell.hbar = opt.hbar;
        auto sg = nose_shell_grid(nose, shell_frames, shell_r, shell_p, opt.C, opt.sigma_E, opt.shell_p_eta_nodes);
        res.sign = resolve_weight_sign(e, frames, op, shell, shell_frames, sg);
    }
    return res;
}

ExperimentResult run_experiment(const RunConfig& c) {
    prepare_dir(c.output.dir);
    if (c.experiment == "classical-run") return run_classical(c);
    if (c.experiment == "sample-canonical") return run_sampling(c);
    if (c.experiment == "qcle-run") return run_qcle(c);
    if (c.experiment == "stationary-check") return run_stationary(c);
    if (c.experiment == "jacobi-check") return run_jacobi(c);
    if (c.experiment == "bracket-verify") return run_bracket_verify(c);
    throw ConfigError("config.experiment: unknown experiment '" + c.experiment + "'");
}

}  // namespace nhbrack
