// operator_algebra.hpp: commutators, operator-valued Poisson brackets and the
// quantum-classical bracket on phase-space grids.
#pragma once

#include "nhbrack/bracket.hpp"
#include "nhbrack/phase_grid.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace nhbrack {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

// [a b] . [[0, 1], [-1, 0]] . [a b]^T
CMatrix commutator_matrix_form(const CMatrix& a, const CMatrix& b);
// [a b] . [[0, zeta], [-zeta, 0]] . [a b]^T = a zeta b - b zeta a
CMatrix generalized_commutator(const CMatrix& a, const CMatrix& b, const CMatrix& zeta);
// (i / hbar) [h, chi]
CMatrix heisenberg_rhs(const CMatrix& h, const CMatrix& chi, double hbar);

// n x n complex operator per node of a phase-space grid, or at a single point.
class OperatorField {
public:
    using Generator = std::function<CMatrix(const Eigen::VectorXd&)>;

    static OperatorField on_grid(std::shared_ptr<const PhaseGrid> grid, int n, const Generator& f);
    static OperatorField at_point(const Eigen::VectorXd& x, const CMatrix& value);
    static OperatorField zeros_like(const OperatorField& other);

    int n() const { return n_; }
    bool has_grid() const { return static_cast<bool>(grid_); }
    const std::shared_ptr<const PhaseGrid>& grid() const { return grid_; }
    std::size_t nodes() const { return values_.size() / static_cast<std::size_t>(n_ * n_); }
    Eigen::VectorXd point(std::size_t k) const;

    Eigen::Map<CMatrix> at(std::size_t k);
    Eigen::Map<const CMatrix> at(std::size_t k) const;
    cplx* data() { return values_.data(); }
    const cplx* data() const { return values_.data(); }

    // d/dX_axis with 4th-order stencils; throws UnsupportedError for single points.
    OperatorField derivative(int axis, DiffScheme scheme = DiffScheme::Central4) const;

    double max_abs() const;
    double hermiticity_defect() const;  // max over nodes of max |A - A^dagger|
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    OperatorField& operator+=(const OperatorField& o);
    OperatorField& operator-=(const OperatorField& o);
    OperatorField& operator*=(cplx s);
    friend OperatorField operator+(OperatorField a, const OperatorField& b) { return a += b; }
    friend OperatorField operator-(OperatorField a, const OperatorField& b) { return a -= b; }
    friend OperatorField operator*(cplx s, OperatorField a) { return a *= s; }
    // Node-wise matrix product.
    friend OperatorField operator*(const OperatorField& a, const OperatorField& b);

    void check_compatible(const OperatorField& o) const;

private:
    int n_{1};
    std::shared_ptr<const PhaseGrid> grid_;
    Eigen::VectorXd single_point_;
    std::vector<cplx> values_;
};

// Operator-valued Poisson bracket sum_ij (da/dX_i) B_ij (db/dX_j) = -a Lambda b,
// a's derivative on the left of each product.
OperatorField lambda_apply(const OperatorField& a, const OperatorField& b, const BracketStructure& s);

enum class DKind { PureQuantum, QuantumClassical };

struct DMatrixSpec {
    DKind kind{DKind::QuantumClassical};
    std::optional<CMatrix> zeta;  // PureQuantum only; identity when empty
    std::optional<BracketStructure> structure;  // QuantumClassical only
    double hbar{1.0};
};

// (i/hbar) [a b] . D . [a b]^T for either kind of D.
OperatorField d_bracket(const OperatorField& a, const OperatorField& b, const DMatrixSpec& spec);
// (i/hbar)[h, chi] - {h, chi}/2 + {chi, h}/2, assembled through D.
OperatorField qc_bracket(const OperatorField& h, const OperatorField& chi, const DMatrixSpec& spec);
// Direct three-term evaluation of the same bracket, for cross-checks.
OperatorField qc_bracket_direct(const OperatorField& h, const OperatorField& chi, const DMatrixSpec& spec);

struct QcJacobiResult {
    OperatorField residual;     // (a,(b,c)) + (c,(a,b)) + (b,(c,a))
    OperatorField twelve_term;  // 1/4 sum of the twelve nested Lambda terms
    double residual_max{0.0};
    double twelve_term_max{0.0};
    double difference_max{0.0};
};
QcJacobiResult qc_jacobi_residual(const OperatorField& a, const OperatorField& b, const OperatorField& c,
                                  const DMatrixSpec& spec);

}  // namespace nhbrack
