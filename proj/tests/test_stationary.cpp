// test_stationary.cpp: stationary densities, the order-hbar term and the
// marginal over the Nose variables.
#include "nhbrack/errors.hpp"
#include "nhbrack/experiments.hpp"
#include "nhbrack/stationary.hpp"

#include <doctest.h>

#include <cmath>

using namespace nhbrack;

namespace {

EnsembleSpec spec_of(Layout k) {
    EnsembleSpec s;
    s.kind = k;
    return s;
}

LiouvillianOptions spectral() {
    LiouvillianOptions o;
    o.flow = FlowScheme::Spectral;
    o.jump = JumpScheme::Spectral;
    return o;
}

}  // namespace

TEST_SUITE("stationary") {
    TEST_CASE("bracket factor against high-precision values") {
        // 50-digit evaluations of (1 - e^{-b x}) / (-x) + (b / 2)(1 + e^{-b x}).
        struct Row {
            double x, beta, want;
        };
        const Row rows[] = {{1e-5, 1.0, 8.3332916667916677523e-12}, {-3e-5, 2.0, 6.0001800032400435045e-10},
                            {5e-5, 0.5, 2.6041341148274728516e-11}, {1e-7, 1.0, 8.3333329166666784125e-16},
                            {0.5, 1.0, 0.016326649281583559009},    {-1.2, 0.7, 0.06375596122247230904},
                            {2.0, 3.0, 1.0049575043533327168}};
        for (const auto& r : rows) {
            CHECK(std::abs(rho1_bracket_factor(r.x, r.beta) - r.want) <= 1e-8 * std::max(1.0, std::abs(r.want)));
            CHECK(rho1_bracket_factor(r.x, r.beta) == doctest::Approx(r.want).epsilon(1e-6));
        }
        CHECK(rho1_bracket_factor(0.0, 1.0) == 0.0);
    }

    TEST_CASE("exponential form depends on the extended energy only") {
        const EnsembleSpec s = spec_of(Layout::NHC2);
        auto g = make_layout_grid(s, stationary_axes(s, 16, 5.0, 16, 8, 8));
        const auto frames = FrameField::build(QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0), g->axis(0), 1.0);
        StationarySpec sp;
        sp.ensemble = s;
        const auto rho = stationary_rho0(sp, frames, g);
        CHECK(rho.trace().real() == doctest::Approx(1.0));
        // R -> -R with P -> -P leaves E_a + P^2/2 unchanged for this symmetric model.
        const auto& ax = g->axes();
        const std::size_t k1 = 3 * g->stride(0) + 5 * g->stride(3) + 2 * g->stride(4);
        const std::size_t k2 = static_cast<std::size_t>(ax[0].nodes - 3) * g->stride(0) +
                               static_cast<std::size_t>(ax[3].nodes - 5) * g->stride(3) + 2 * g->stride(4);
        CHECK(rho.at(k1, 0, 0).real() == doctest::Approx(rho.at(k2, 0, 0).real()).epsilon(1e-12));
        for (std::size_t k = 0; k < g->size(); k += 97) CHECK(rho.at(k, 0, 1) == cplx{});
    }

    TEST_CASE("Nose delta form ratio equals exp(dw) times the Gaussian ratio") {
        EnsembleSpec s = spec_of(Layout::Nose);
        const auto model = QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0);
        const GridAxis r{"R", -2, 2, 8, Boundary::Truncated}, p{"P", -2, 2, 8, Boundary::Truncated};
        const auto frames = FrameField::build(model, r, 1.0);
        auto g = nose_shell_grid(s, frames, r, p, 1.0, 0.1, 8);
        StationarySpec sp;
        sp.ensemble = s;
        sp.form = StationaryForm::DeltaShell;
        sp.C = 1.0;
        sp.sigma_E = 0.1;
        const auto rho = stationary_rho0(sp, frames, g);
        auto h = [&](std::size_t k) {
            const auto x = g->point(k);
            return frames.frames[static_cast<std::size_t>(g->index_along(k, 0))].E[0] + 0.5 * x[2] * x[2] +
                   0.5 * x[3] * x[3] + x[1];
        };
        // Two nodes inside the shell with different eta.
        std::vector<std::size_t> near;
        for (std::size_t k = 0; k < g->size(); ++k) {
            if (std::abs(1.0 - h(k)) < 0.15) near.push_back(k);
        }
        REQUIRE(near.size() >= 2);
        const std::size_t a = near.front(), b = near.back();
        REQUIRE(g->point(a)[1] != g->point(b)[1]);
        const auto gauss = [](double u) { return std::exp(-0.5 * u * u / 0.01); };
        const double want = std::exp(g->point(a)[1] - g->point(b)[1]) * gauss(1.0 - h(a)) / gauss(1.0 - h(b));
        CHECK(rho.at(a, 0, 0).real() / rho.at(b, 0, 0).real() == doctest::Approx(want).epsilon(1e-10));
    }

    TEST_CASE("uncovered energy shell is a domain error") {
        EnsembleSpec s = spec_of(Layout::Nose);
        auto g = make_layout_grid(s, {{"R", -1, 1, 8}, {"eta", -0.1, 0.1, 8}, {"P", -1, 1, 8}, {"p_eta", -1, 1, 8}});
        const auto frames = FrameField::build(QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0), g->axis(0), 1.0);
        StationarySpec sp;
        sp.ensemble = s;
        sp.form = StationaryForm::DeltaShell;
        sp.C = 50.0;
        CHECK_THROWS_AS(stationary_rho0(sp, frames, g), DomainError);
        sp.sigma_E = 0.0;
        CHECK_THROWS_AS(sp.validate(), std::invalid_argument);
    }

    TEST_CASE("order-hbar term vanishes at P = 0 and for uncoupled surfaces") {
        const EnsembleSpec s = spec_of(Layout::Nose);
        auto axes = stationary_axes(s, 16, 5.0, 17, 8, 8);
        axes[2].boundary = Boundary::Truncated;  // odd truncated axis has a node at P = 0
        auto g = make_layout_grid(s, axes);
        StationarySpec sp;
        sp.ensemble = s;
        const auto frames = FrameField::build(QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0), g->axis(0), 1.0);
        const auto rho1 = stationary_rho1(stationary_rho0(sp, frames, g), frames, s);
        for (std::size_t k = 0; k < g->size(); ++k) {
            if (g->index_along(k, 2) == 8) CHECK(std::abs(rho1.at(k, 0, 1)) == 0.0);
            CHECK(rho1.at(k, 0, 0) == cplx{});
        }
        const auto flat = FrameField::build(QuantumModel::diagonal(2, 0.0, 1.0, 1.0), g->axis(0), 1.0);
        CHECK(stationary_rho1(stationary_rho0(sp, flat, g), flat, s).l2_norm() == 0.0);
    }

    TEST_CASE("degenerate surfaces are rejected by the order-hbar term") {
        const EnsembleSpec s = spec_of(Layout::Nose);
        auto g = make_layout_grid(s, stationary_axes(s, 8, 2.0, 8, 8, 8));
        CHECK_THROWS_AS(FrameField::build(QuantumModel::diagonal(2, 0.0, 0.0, 1.0), g->axis(0), 1.0), DegeneracyError);
        const auto frames = FrameField::build(QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0), g->axis(0), 1.0);
        StationarySpec sp;
        sp.ensemble = s;
        const auto rho0 = stationary_rho0(sp, frames, g);
        FrameField touching = frames;
        touching.frames[3].E[1] = touching.frames[3].E[0];
        CHECK_THROWS_AS(stationary_rho1(rho0, touching, s), DegeneracyError);
    }

    TEST_CASE("recursion reproduces the closed-form order-hbar term") {
        const EnsembleSpec s = spec_of(Layout::Nose);
        auto g = make_layout_grid(s, stationary_axes(s, 24, 7.0, 32, 8, 8, 7.0));
        const auto frames = FrameField::build(QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0), g->axis(0), 0.2);
        const auto op = build_liouvillian(frames, s, g, Side::Density, spectral());
        StationarySpec sp;
        sp.ensemble = s;
        const auto rho0 = stationary_rho0(sp, frames, g);
        const auto a = stationary_rho1(rho0, frames, s);
        const auto b = rho1_from_recursion(rho0, op);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.values().size(); ++i) diff = std::max(diff, std::abs(a.values()[i] - b.values()[i]));
        CHECK(diff <= 1e-8);
        DensityField sum = rho0;
        sum.axpy(0.2, a);
        CHECK(sum.hermiticity_defect() <= 1e-12);
    }

    TEST_CASE("Fredholm integrals vanish by parity and the control does not") {
        const EnsembleSpec s = spec_of(Layout::Nose);
        auto g = make_layout_grid(s, stationary_axes(s, 16, 6.0, 16, 8, 8));
        const auto frames = FrameField::build(QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0), g->axis(0), 1.0);
        const auto op = build_liouvillian(frames, s, g, Side::Density, spectral());
        StationarySpec sp;
        sp.ensemble = s;
        const auto rho0 = stationary_rho0(sp, frames, g);
        const auto f = fredholm_check(stationary_rho1(rho0, frames, s), op);
        CHECK(f.values.size() == 2);
        CHECK(f.max_abs <= 1e-8);
        CHECK(fredholm_check(parity_violating_control(rho0, s), op).max_abs > 1e-6);
    }

    TEST_CASE("marginal over the Nose variables is canonical when g = N") {
        const auto model = QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0);
        const GridAxis r{"R", -2.5, 2.5, 10, Boundary::Truncated}, p{"P", -2.5, 2.5, 10, Boundary::Truncated};
        const auto frames = FrameField::build(model, r, 1.0);
        for (double g_over_n : {1.0, 2.0}) {
            EnsembleSpec s = spec_of(Layout::Nose);
            s.temperature = 0.8;
            s.g = g_over_n;
            StationarySpec sp;
            sp.ensemble = s;
            sp.form = StationaryForm::DeltaShell;
            sp.C = 1.0;
            sp.sigma_E = 0.05;
            auto g = nose_shell_grid(s, frames, r, p, sp.C, sp.sigma_E, 10);
            const auto m = marginalize_nose(stationary_rho0(sp, frames, g), frames, s);
            CHECK(m.expected_slope == doctest::Approx(-1.25 / g_over_n));
            CHECK(m.slope == doctest::Approx(m.expected_slope).epsilon(1e-6));
            CHECK(m.fit_max <= 1e-6);
            CHECK(m.warnings.empty());
        }
    }

    TEST_CASE("the minus sign of the measure exponent is the stationary one") {
        const auto model = QuantumModel::linear_vibronic(2, 0.5, 1.0, 1.0);
        const EnsembleSpec s = spec_of(Layout::Nose);
        auto g = make_layout_grid(s, stationary_axes(s, 24, 7.0, 16, 16, 8));
        const auto frames = FrameField::build(QuantumModel::diagonal(2, 0.0, 1.0, 1.0), g->axis(0), 1.0);
        const auto op = build_liouvillian(frames, s, g, Side::Density, spectral());
        const GridAxis r{"R", -2, 2, 8, Boundary::Truncated}, p{"P", -2, 2, 8, Boundary::Truncated};
        const auto shell_frames = FrameField::build(model, r, 1.0);
        StationarySpec e;
        e.ensemble = s;
        StationarySpec shell = e;
        shell.form = StationaryForm::DeltaShell;
        shell.C = 1.0;
        const auto res = resolve_weight_sign(e, frames, op, shell, shell_frames, nose_shell_grid(s, shell_frames, r, p, 1.0, 0.05, 8));
        CHECK(res.chosen == -1);
        CHECK(res.consistent);
        CHECK(res.residual_minus < 1e-4);
        CHECK(res.residual_plus > 1e-2);
    }
}
