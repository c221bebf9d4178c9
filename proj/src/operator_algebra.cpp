// operator_algebra.cpp: operator-valued phase-space fields, commutators and the quantum-classical bracket.
#include "nhbrack/operator_algebra.hpp"

#include "nhbrack/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nhbrack {

namespace {

const cplx I{0.0, 1.0};

void check_square_pair(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw StructuralError("operators must be square with equal dimension");
    }
}

}  // namespace

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, -I, I, 0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix commutator_matrix_form(const CMatrix& a, const CMatrix& b) {
    check_square_pair(a, b);
    const Eigen::Matrix2d bsym{{0.0, 1.0}, {-1.0, 0.0}};
    const CMatrix* ops[2] = {&a, &b};
    CMatrix out = CMatrix::Zero(a.rows(), a.cols());
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (bsym(i, j) != 0.0) out.noalias() += bsym(i, j) * (*ops[i]) * (*ops[j]);
        }
    }
    return out;
}

CMatrix generalized_commutator(const CMatrix& a, const CMatrix& b, const CMatrix& zeta) {
    check_square_pair(a, b);
    check_square_pair(a, zeta);
    return a * zeta * b - b * zeta * a;
}

CMatrix heisenberg_rhs(const CMatrix& h, const CMatrix& chi, double hbar) {
    check_square_pair(h, chi);
    if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be > 0");
    return (I / hbar) * (h * chi - chi * h);
}

OperatorField OperatorField::on_grid(std::shared_ptr<const PhaseGrid> grid, int n, const Generator& f) {
    if (!grid) throw std::invalid_argument("operator field needs a grid");
    if (n < 1) throw StructuralError("operator dimension must be >= 1");
    OperatorField out;
    out.n_ = n;
    out.grid_ = std::move(grid);
    out.values_.assign(out.grid_->size() * static_cast<std::size_t>(n * n), cplx{});
    for (std::size_t k = 0; k < out.grid_->size(); ++k) {
        const CMatrix v = f(out.grid_->point(k));
        if (v.rows() != n || v.cols() != n) throw StructuralError("generator returned wrong operator shape");
        out.at(k) = v;
    }
    return out;
}

OperatorField OperatorField::at_point(const Eigen::VectorXd& x, const CMatrix& value) {
    if (value.rows() != value.cols() || value.rows() < 1) throw StructuralError("operator must be square");
    OperatorField out;
    out.n_ = static_cast<int>(value.rows());
    out.single_point_ = x;
    out.values_.assign(value.data(), value.data() + value.size());
    return out;
}

OperatorField OperatorField::zeros_like(const OperatorField& other) {
    OperatorField out = other;
    std::fill(out.values_.begin(), out.values_.end(), cplx{});
    return out;
}

Eigen::VectorXd OperatorField::point(std::size_t k) const {
    if (grid_) return grid_->point(k);
    return single_point_;
}

Eigen::Map<CMatrix> OperatorField::at(std::size_t k) {
    return Eigen::Map<CMatrix>(values_.data() + k * static_cast<std::size_t>(n_ * n_), n_, n_);
}

Eigen::Map<const CMatrix> OperatorField::at(std::size_t k) const {
    return Eigen::Map<const CMatrix>(values_.data() + k * static_cast<std::size_t>(n_ * n_), n_, n_);
}

OperatorField OperatorField::derivative(int axis, DiffScheme scheme) const {
    if (!grid_) throw UnsupportedError("phase-space derivative of a single-point operator field");
    if (axis < 0 || axis >= grid_->dims()) throw StructuralError("derivative axis out of range");
    OperatorField out = zeros_like(*this);
    differentiate(*grid_, axis, scheme, values_.data(), out.values_.data(), static_cast<std::size_t>(n_ * n_));
    return out;
}

double OperatorField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double OperatorField::hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t k = 0; k < nodes(); ++k) m = std::max(m, (at(k) - at(k).adjoint()).cwiseAbs().maxCoeff());
    return m;
}

void OperatorField::check_compatible(const OperatorField& o) const {
    if (n_ != o.n_) throw StructuralError("operator fields have different Hilbert dimensions");
    if (static_cast<bool>(grid_) != static_cast<bool>(o.grid_)) {
        throw StructuralError("cannot combine a grid field with a single-point field");
    }
    if (grid_ && grid_ != o.grid_ && !grid_->same_shape(*o.grid_)) {
        throw StructuralError("operator fields live on different grids");
    }
    if (!grid_ && !single_point_.isApprox(o.single_point_, 0.0)) {
        throw StructuralError("single-point operator fields at different points");
    }
}

OperatorField& OperatorField::operator+=(const OperatorField& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

OperatorField& OperatorField::operator-=(const OperatorField& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

OperatorField& OperatorField::operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
}

OperatorField operator*(const OperatorField& a, const OperatorField& b) {
    a.check_compatible(b);
    OperatorField out = OperatorField::zeros_like(a);
    for (std::size_t k = 0; k < a.nodes(); ++k) out.at(k).noalias() = a.at(k) * b.at(k);
    return out;
}

OperatorField lambda_apply(const OperatorField& a, const OperatorField& b, const BracketStructure& s) {
    a.check_compatible(b);
    if (!a.has_grid()) throw UnsupportedError("operator-valued Poisson bracket needs derivative data (grid field)");
    const PhaseGrid& grid = *a.grid();
    if (grid.dims() != s.dim()) throw StructuralError("grid dimension does not match bracket dimension");
    const int d = s.dim();
    std::vector<OperatorField> da, db;
    da.reserve(static_cast<std::size_t>(d));
    db.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        da.push_back(a.derivative(i));
        db.push_back(b.derivative(i));
    }
    OperatorField out = OperatorField::zeros_like(a);
    const std::size_t nodes = grid.size();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < nodes; ++k) {
        const Eigen::MatrixXd bm = s.matrix(grid.point(k));
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                if (bm(i, j) == 0.0) continue;
                out.at(k).noalias() += bm(i, j) * (da[static_cast<std::size_t>(i)].at(k) * db[static_cast<std::size_t>(j)].at(k));
            }
        }
    }
    return out;
}

OperatorField d_bracket(const OperatorField& a, const OperatorField& b, const DMatrixSpec& spec) {
    a.check_compatible(b);
    if (!(spec.hbar > 0.0)) throw std::invalid_argument("hbar must be > 0");
    const cplx pref = I / spec.hbar;
    if (spec.kind == DKind::PureQuantum) {
        const CMatrix zeta = spec.zeta.value_or(CMatrix::Identity(a.n(), a.n()));
        if (zeta.rows() != a.n() || zeta.cols() != a.n()) throw StructuralError("zeta has the wrong dimension");
        OperatorField out = OperatorField::zeros_like(a);
        for (std::size_t k = 0; k < a.nodes(); ++k) out.at(k) = pref * generalized_commutator(a.at(k), b.at(k), zeta);
        return out;
    }
    if (!spec.structure) throw std::invalid_argument("quantum-classical D needs a bracket structure");
    // a (1 + hbar Lambda / 2i) b - b (1 + hbar Lambda / 2i) a, with a Lambda b = -{a, b}.
    OperatorField out = a * b - b * a;
    const cplx lam = spec.hbar / (2.0 * I);
    OperatorField ab = lambda_apply(a, b, *spec.structure);
    OperatorField ba = lambda_apply(b, a, *spec.structure);
    out += (-lam) * (ab - ba);
    out *= pref;
    return out;
}

OperatorField qc_bracket(const OperatorField& h, const OperatorField& chi, const DMatrixSpec& spec) {
    if (spec.kind != DKind::QuantumClassical) throw std::invalid_argument("qc_bracket needs a quantum-classical D");
    return d_bracket(h, chi, spec);
}

OperatorField qc_bracket_direct(const OperatorField& h, const OperatorField& chi, const DMatrixSpec& spec) {
    if (spec.kind != DKind::QuantumClassical || !spec.structure) {
        throw std::invalid_argument("qc_bracket_direct needs a quantum-classical D with a structure");
    }
    OperatorField out = (I / spec.hbar) * (h * chi - chi * h);
    out -= 0.5 * lambda_apply(h, chi, *spec.structure);
    out += 0.5 * lambda_apply(chi, h, *spec.structure);
    return out;
}

QcJacobiResult qc_jacobi_residual(const OperatorField& a, const OperatorField& b, const OperatorField& c,
                                  const DMatrixSpec& spec) {
    a.check_compatible(b);
    a.check_compatible(c);
    auto br = [&spec](const OperatorField& x, const OperatorField& y) { return d_bracket(x, y, spec); };
    QcJacobiResult r{br(a, br(b, c)) + br(c, br(a, b)) + br(b, br(c, a)), OperatorField::zeros_like(a)};
    if (spec.kind == DKind::QuantumClassical) {
        const BracketStructure& s = *spec.structure;
        auto L = [&s](const OperatorField& x, const OperatorField& y) { return lambda_apply(x, y, s); };
        const OperatorField bc = L(b, c), cb = L(c, b), ab = L(a, b), ba = L(b, a), ac = L(a, c), ca = L(c, a);
        OperatorField t = L(a, bc) - L(a, cb) - L(bc, a) + L(cb, a);
        t += L(c, ab) - L(b, ac) - L(ab, c) + L(ac, b);
        t += L(b, ca) - L(c, ba) - L(ca, b) + L(ba, c);
        t *= 0.25;
        r.twelve_term = std::move(t);
    }
    r.residual_max = r.residual.max_abs();
    r.twelve_term_max = r.twelve_term.max_abs();
    r.difference_max = (r.residual - r.twelve_term).max_abs();
    return r;
}

}  // namespace nhbrack
