// test_operator_algebra.cpp: commutators, Lambda brackets and the
// quantum-classical bracket.
#include "nhbrack/errors.hpp"
#include "nhbrack/operator_algebra.hpp"

#include <doctest.h>

#include <random>

using namespace nhbrack;

namespace {

const cplx I{0.0, 1.0};

CMatrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
    }
    return m;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::shared_ptr<const PhaseGrid> rp_grid(int nodes = 16) {
    return std::make_shared<const PhaseGrid>(std::vector<GridAxis>{{"R", -1.5, 1.5, nodes, Boundary::Truncated},
                                                                    {"P", -1.0, 2.0, nodes, Boundary::Truncated}});
}

DMatrixSpec qc_spec(double hbar = 1.0) {
    DMatrixSpec s;
    s.kind = DKind::QuantumClassical;
    s.structure = BracketStructure::symplectic(1);
    s.hbar = hbar;
    return s;
}

OperatorField make(const std::shared_ptr<const PhaseGrid>& g, std::function<CMatrix(double, double)> f) {
    return OperatorField::on_grid(g, 2, [f](const Eigen::VectorXd& x) { return f(x[0], x[1]); });
}

}  // namespace

TEST_SUITE("operator_algebra") {
    TEST_CASE("matrix form of the commutator on Pauli matrices") {
        CHECK(max_abs(commutator_matrix_form(pauli_x(), pauli_y()) - 2.0 * I * pauli_z()) == 0.0);
        CHECK(max_abs(commutator_matrix_form(pauli_x(), pauli_x())) == 0.0);
    }

    TEST_CASE("matrix form equals ab - ba on random matrices") {
        std::mt19937_64 rng(7);
        for (int t = 0; t < 50; ++t) {
            const CMatrix a = random_matrix(rng, 4), b = random_matrix(rng, 4);
            CHECK(max_abs(commutator_matrix_form(a, b) - (a * b - b * a)) <= 1e-14);
        }
    }

    TEST_CASE("Lie axioms of the commutator") {
        std::mt19937_64 rng(11);
        for (int n = 2; n <= 5; ++n) {
            const CMatrix a = random_matrix(rng, n), b = random_matrix(rng, n), c = random_matrix(rng, n);
            auto com = [](const CMatrix& x, const CMatrix& y) { return commutator_matrix_form(x, y); };
            CHECK(max_abs(com(a, b) + com(b, a)) <= 1e-13);
            CHECK(max_abs(com(a * b, c) - (a * com(b, c) + com(a, c) * b)) <= 1e-13);
            CHECK(max_abs(com(3.5 * CMatrix::Identity(n, n), a)) <= 1e-13);
            CHECK(max_abs(com(a, com(b, c)) + com(c, com(a, b)) + com(b, com(c, a))) <= 1e-13);
        }
    }

    TEST_CASE("generalized commutator with identity zeta is the commutator") {
        std::mt19937_64 rng(3);
        const CMatrix a = random_matrix(rng, 3), b = random_matrix(rng, 3);
        CHECK(max_abs(generalized_commutator(a, b, CMatrix::Identity(3, 3)) - (a * b - b * a)) <= 1e-14);
        const CMatrix z = random_matrix(rng, 3);
        CHECK(max_abs(generalized_commutator(a, b, z) - (a * z * b - b * z * a)) <= 1e-13);
    }

    TEST_CASE("Heisenberg right-hand side") {
        CHECK(max_abs(heisenberg_rhs(pauli_z(), pauli_z(), 1.0)) == 0.0);
        CHECK(max_abs(heisenberg_rhs(pauli_z(), pauli_x(), 1.0) + 2.0 * pauli_y()) <= 1e-15);
        std::mt19937_64 rng(5);
        CHECK(max_abs(heisenberg_rhs(random_matrix(rng, 3), CMatrix::Identity(3, 3), 0.7)) <= 1e-14);
        CHECK_THROWS_AS(heisenberg_rhs(pauli_z(), CMatrix::Identity(3, 3), 1.0), StructuralError);
    }

    TEST_CASE("Lambda bracket of operator fields") {
        auto g = rp_grid();
        const auto s = BracketStructure::symplectic(1);
        const auto r = make(g, [](double R, double) { return CMatrix(R * CMatrix::Identity(2, 2)); });
        const auto p = make(g, [](double, double P) { return CMatrix(P * CMatrix::Identity(2, 2)); });
        const auto one = lambda_apply(r, p, s);
        for (std::size_t k = 0; k < one.nodes(); ++k) CHECK(max_abs(one.at(k) - CMatrix::Identity(2, 2)) <= 1e-12);
        CHECK(lambda_apply(r, r, s).max_abs() <= 1e-12);

        const auto a = make(g, [](double R, double) { return CMatrix(R * pauli_x()); });
        const auto b = make(g, [](double, double P) { return CMatrix(P * pauli_y()); });
        const auto ab = lambda_apply(a, b, s);
        const CMatrix expect = pauli_x() * pauli_y();
        for (std::size_t k = 0; k < ab.nodes(); ++k) CHECK(max_abs(ab.at(k) - expect) <= 1e-12);
    }

    TEST_CASE("single-point fields have no derivatives") {
        const auto f = OperatorField::at_point(Eigen::Vector2d(0.1, 0.2), pauli_x());
        CHECK_THROWS_AS(f.derivative(0), UnsupportedError);
        CHECK_THROWS_AS(lambda_apply(f, f, BracketStructure::symplectic(1)), UnsupportedError);
    }

    TEST_CASE("quantum-classical bracket reductions and the symbolic oracle") {
        auto g = rp_grid();
        const auto spec = qc_spec(0.5);
        // Constant fields: only the commutator survives.
        const auto cx = make(g, [](double, double) { return pauli_x(); });
        const auto cz = make(g, [](double, double) { return pauli_z(); });
        const auto cc = qc_bracket(cx, cz, spec);
        const CMatrix com = (I / 0.5) * (pauli_x() * pauli_z() - pauli_z() * pauli_x());
        for (std::size_t k = 0; k < cc.nodes(); ++k) CHECK(max_abs(cc.at(k) - com) <= 1e-12);

        // Scalar fields reduce to {B, A}: -{R^2 P, P^2 + R} = R^2 - 4RP^2.
        const auto s1 = make(g, [](double R, double P) { return CMatrix(R * R * P * CMatrix::Identity(2, 2)); });
        const auto s2 = make(g, [](double R, double P) { return CMatrix((P * P + R) * CMatrix::Identity(2, 2)); });
        const auto ss = qc_bracket(s1, s2, spec);
        for (std::size_t k = 0; k < ss.nodes(); ++k) {
            const auto x = ss.point(k);
            const double want = x[0] * x[0] - 4.0 * x[0] * x[1] * x[1];
            CHECK(max_abs(ss.at(k) - want * CMatrix::Identity(2, 2)) <= 1e-10);
        }

        // h = P^2/2 + R sigma_z, chi = P sigma_x: sympy gives -2 R P sigma_y / hbar.
        const auto h = make(g, [](double R, double P) { return CMatrix(0.5 * P * P * CMatrix::Identity(2, 2) + R * pauli_z()); });
        const auto chi = make(g, [](double, double P) { return CMatrix(P * pauli_x()); });
        const auto hc = qc_bracket(h, chi, spec);
        const auto direct = qc_bracket_direct(h, chi, spec);
        for (std::size_t k = 0; k < hc.nodes(); ++k) {
            const auto x = hc.point(k);
            CHECK(max_abs(hc.at(k) + (2.0 * x[0] * x[1] / 0.5) * pauli_y()) <= 1e-10);
            CHECK(max_abs(hc.at(k) - direct.at(k)) <= 1e-12);
        }
        CHECK(hc.is_hermitian());
        CHECK(qc_bracket(h, h, spec).max_abs() <= 1e-12);
    }

    TEST_CASE("qc bracket requires the quantum-classical kind") {
        auto g = rp_grid();
        const auto a = make(g, [](double, double) { return pauli_x(); });
        DMatrixSpec pure;
        pure.kind = DKind::PureQuantum;
        CHECK_THROWS(qc_bracket(a, a, pure));
        // Pure-quantum D reproduces (i/hbar)[a, b].
        const auto b = make(g, [](double, double) { return pauli_y(); });
        const auto d = d_bracket(a, b, pure);
        CHECK(max_abs(d.at(0) - I * (pauli_x() * pauli_y() - pauli_y() * pauli_x())) <= 1e-14);
    }

    TEST_CASE("qc Jacobi residual: zero for trivial triples, nonzero for generic ones") {
        auto g = rp_grid(20);
        const auto spec = qc_spec(1.0);
        const auto c1 = make(g, [](double, double) { return pauli_x(); });
        const auto c2 = make(g, [](double, double) { return pauli_y(); });
        const auto c3 = make(g, [](double, double) { return pauli_z(); });
        CHECK(qc_jacobi_residual(c1, c2, c3, spec).residual_max <= 1e-8);

        // Oracle values from symbolic nested brackets (hbar independent).
        struct Case {
            std::function<CMatrix(double, double)> a, b, c;
            CMatrix want;
        };
        const std::vector<Case> cases{
            {[](double R, double) { return CMatrix(R * pauli_x()); }, [](double, double P) { return CMatrix(P * pauli_y()); },
             [](double R, double P) { return CMatrix(R * P * pauli_y()); }, -pauli_x()},
            {[](double R, double) { return CMatrix(R * pauli_x()); },
             [](double, double P) { return CMatrix(P * P * pauli_z()); }, [](double R, double) { return CMatrix(R * pauli_z()); },
             -2.0 * pauli_x()},
            {[](double, double P) { return CMatrix(P * pauli_y()); }, [](double R, double P) { return CMatrix(R * P * pauli_y()); },
             [](double R, double) { return CMatrix(R * pauli_z()); }, -pauli_z()},
        };
        for (const auto& cs : cases) {
            const auto res = qc_jacobi_residual(make(g, cs.a), make(g, cs.b), make(g, cs.c), spec);
            for (std::size_t k = 0; k < res.residual.nodes(); ++k) {
                CHECK(max_abs(res.residual.at(k) - cs.want) <= 1e-8);
            }
            CHECK(res.difference_max <= 1e-8);
        }
    }
}
