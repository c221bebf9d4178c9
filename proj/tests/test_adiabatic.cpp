// test_adiabatic.cpp: adiabatic frames, couplings and forces.
#include "nhbrack/adiabatic.hpp"
#include "nhbrack/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace nhbrack;

namespace {

// Independent eigenvectors with a fixed sign convention (first entry >= 0).
Eigen::MatrixXd eigvecs(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::MatrixXd u = es.eigenvectors();
    for (int c = 0; c < u.cols(); ++c) {
        if (u(0, c) < 0.0) u.col(c) *= -1.0;
    }
    return u;
}

}  // namespace

TEST_SUITE("adiabatic") {
    TEST_CASE("two-level energies") {
        const auto m = QuantumModel::linear_vibronic(2, 1.0, 1.0, 0.0);
        const auto f0 = adiabatize(m, 0.0);
        CHECK(f0.E[0] == doctest::Approx(-1.0));
        CHECK(f0.E[1] == doctest::Approx(1.0));
        for (double R : {-1.3, 0.4, 2.2}) {
            const auto m2 = QuantumModel::linear_vibronic(2, 0.7, 0.5, 1.5);
            const auto f = adiabatize(m2, R);
            const double root = std::sqrt(0.49 * R * R + 0.25);
            CHECK(f.E[0] == doctest::Approx(0.75 * R * R - root).epsilon(1e-12));
            CHECK(f.E[1] == doctest::Approx(0.75 * R * R + root).epsilon(1e-12));
        }
    }

    TEST_CASE("nonadiabatic coupling matches finite-difference eigenvectors") {
        const auto m = QuantumModel::linear_vibronic(2, 1.0, 1.0, 1.0);
        for (double R : {-0.8, 0.3, 1.1}) {
            const auto f = adiabatize(m, R);
            const double h = 1e-5;
            const Eigen::MatrixXd du = (eigvecs(m.h_at(R + h)) - eigvecs(m.h_at(R - h))) / (2.0 * h);
            const Eigen::MatrixXd u = eigvecs(m.h_at(R));
            // <a|d/dR|b> is gauge covariant: compare after aligning the frame's signs.
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double sa = f.U.col(a).dot(u.col(a)) > 0 ? 1.0 : -1.0;
                    const double sb = f.U.col(b).dot(u.col(b)) > 0 ? 1.0 : -1.0;
                    const double want = sa * sb * u.col(a).dot(du.col(b));
                    CHECK(f.d(a, b) == doctest::Approx(want).epsilon(1e-6));
                }
            }
        }
    }

    TEST_CASE("coupling antisymmetry and the off-diagonal force identity") {
        for (const auto& m : {QuantumModel::linear_vibronic(2, 1.0, 1.0, 1.0), QuantumModel::linear_vibronic(3, 0.6, 0.4, 1.0),
                              QuantumModel::spin_boson(0.3, 0.8, 0.5, 1.0)}) {
            const auto f = adiabatize(m, 0.7);
            CHECK((f.d + f.d.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(offdiagonal_force_identity(f).cwiseAbs().maxCoeff() <= 1e-10);
            for (int a = 0; a < f.n(); ++a) CHECK(offdiagonal_force_identity(f)(a, a) == 0.0);
        }
    }

    TEST_CASE("Hellmann-Feynman forces are minus the energy slope") {
        const auto m = QuantumModel::spin_boson(0.3, 0.8, 0.5, 1.0);
        const double R = -0.45, h = 1e-5;
        const auto f = adiabatize(m, R);
        const auto fp = adiabatize(m, R + h);
        const auto fm = adiabatize(m, R - h);
        for (int a = 0; a < 2; ++a) CHECK(f.F_diag[a] == doctest::Approx(-(fp.E[a] - fm.E[a]) / (2.0 * h)).epsilon(1e-6));
        CHECK(f.omega(1, 0) == doctest::Approx(f.E[1] - f.E[0]));
        const auto g = adiabatize(m, R, 0.5);
        CHECK(g.omega(1, 0) == doctest::Approx(2.0 * (f.E[1] - f.E[0])));
    }

    TEST_CASE("model derivatives match finite differences") {
        for (const auto& m : {QuantumModel::linear_vibronic(3, 0.6, 0.4, 1.0), QuantumModel::diagonal(2, 0.5, 1.0, 1.0)}) {
            const double R = 0.9, h = 1e-6;
            const Eigen::MatrixXd fd = (m.h_at(R + h) - m.h_at(R - h)) / (2.0 * h);
            CHECK((fd - m.dh_at(R)).cwiseAbs().maxCoeff() <= 1e-6);
            CHECK((m.h_at(R) - m.h_at(R).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    TEST_CASE("degenerate crossing is reported") {
        const auto m = QuantumModel::linear_vibronic(2, 1.0, 0.0, 1.0);
        CHECK_THROWS_AS(adiabatize(m, 0.0), DegeneracyError);
        CHECK(offdiagonal_force_identity(adiabatize(m, 0.5)).cwiseAbs().maxCoeff() <= 1e-10);
    }

    TEST_CASE("uncoupled surfaces have zero coupling") {
        const auto f = adiabatize(QuantumModel::diagonal(2, 0.5, 1.0, 1.0), 0.8);
        CHECK(f.d.cwiseAbs().maxCoeff() == 0.0);
    }

    TEST_CASE("gauge is continuous along a scan") {
        const auto m = QuantumModel::linear_vibronic(2, 1.0, 0.3, 1.0);
        std::vector<double> rs;
        for (int i = 0; i <= 200; ++i) rs.push_back(-2.0 + 0.02 * i);
        const auto frames = adiabatize_along(m, rs);
        double worst = 0.0;
        for (std::size_t i = 1; i < frames.size(); ++i) {
            worst = std::max(worst, (frames[i].U - frames[i - 1].U).cwiseAbs().maxCoeff() / 0.02);
        }
        // |dU/dR| <= max |d| = a / (2 delta) for this model.
        CHECK(worst <= 1.0 / 0.6 + 0.1);
    }

    TEST_CASE("surface potentials follow the adiabatic energies") {
        const auto m = QuantumModel::linear_vibronic(2, 1.0, 1.0, 1.0);
        const Potential lower = surface_potential(m, 0);
        const Eigen::VectorXd R = Eigen::VectorXd::Constant(1, 0.6);
        const auto f = adiabatize(m, 0.6);
        CHECK(lower.value(R) == doctest::Approx(f.E[0]));
        CHECK(lower.gradient(R)[0] == doctest::Approx(-f.F_diag[0]));
    }
}
