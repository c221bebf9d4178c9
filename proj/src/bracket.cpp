// bracket.cpp: antisymmetric bracket structures, flows and classical Jacobi checks.
#include "nhbrack/bracket.hpp"

#include "nhbrack/errors.hpp"

#include <cmath>

namespace nhbrack {

namespace {

void check_dim(const BracketStructure& s, const Eigen::VectorXd& x) {
    if (x.size() != s.dim()) {
        throw StructuralError("point has dimension " + std::to_string(x.size()) + ", bracket '" + s.name() +
                              "' has " + std::to_string(s.dim()));
    }
}

}  // namespace

double fd_step(double xi) { return 1e-5 * (1.0 + std::abs(xi)); }

Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = fd_step(x[i]);
        y[i] = x[i] + h;
        const double fp = f(y);
        y[i] = x[i] - h;
        const double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Eigen::VectorXd ScalarField::grad(const Eigen::VectorXd& x) const {
    if (gradient) return gradient(x);
    return fd_gradient(value, x);
}

ScalarField ScalarField::coordinate(int i) {
    return {[i](const Eigen::VectorXd& x) { return x[i]; },
            [i](const Eigen::VectorXd& x) {
                Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
                g[i] = 1.0;
                return g;
            }};
}

ScalarField ScalarField::constant(double c) {
    return {[c](const Eigen::VectorXd&) { return c; },
            [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()); }};
}

BracketStructure::BracketStructure(int dim, MatrixFn b, VectorFn div, std::string name)
    : dim_(dim), b_(std::move(b)), div_(std::move(div)), name_(std::move(name)) {
    if (dim_ < 2 || dim_ % 2 != 0) throw StructuralError("bracket dimension must be even and >= 2");
    if (!b_) throw std::invalid_argument("bracket needs a matrix function");
}

BracketStructure BracketStructure::symplectic(int n) {
    if (n < 1) throw StructuralError("symplectic bracket needs n >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n).setIdentity();
    j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return BracketStructure(
        2 * n, [j](const Eigen::VectorXd&) { return j; },
        [n](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2 * n); }, "symplectic");
}

Eigen::MatrixXd BracketStructure::matrix(const Eigen::VectorXd& x) const {
    check_dim(*this, x);
    return b_(x);
}

Eigen::VectorXd BracketStructure::divergence(const Eigen::VectorXd& x) const {
    check_dim(*this, x);
    if (div_) return div_(x);
    return divergence_fd(x);
}

Eigen::VectorXd BracketStructure::divergence_fd(const Eigen::VectorXd& x) const {
    check_dim(*this, x);
    Eigen::VectorXd div = Eigen::VectorXd::Zero(dim_);
    Eigen::VectorXd y = x;
    for (int i = 0; i < dim_; ++i) {
        const double h = fd_step(x[i]);
        y[i] = x[i] + h;
        const Eigen::MatrixXd bp = b_(y);
        y[i] = x[i] - h;
        const Eigen::MatrixXd bm = b_(y);
        y[i] = x[i];
        div += (bp.row(i) - bm.row(i)).transpose() / (2.0 * h);
    }
    return div;
}

double poisson_bracket(const ScalarField& a, const ScalarField& b, const BracketStructure& s,
                       const Eigen::VectorXd& x) {
    check_dim(s, x);
    const Eigen::VectorXd ga = a.grad(x);
    const Eigen::VectorXd gb = b.grad(x);
    if (ga.size() != s.dim() || gb.size() != s.dim()) throw StructuralError("gradient size mismatch");
    return ga.dot(s.matrix(x) * gb);
}

Eigen::VectorXd eom_rhs(const BracketStructure& s, const GeneralizedEnergy& h, const Eigen::VectorXd& x) {
    check_dim(s, x);
    const Eigen::VectorXd gh = h.grad(x);
    if (gh.size() != s.dim()) throw StructuralError("energy gradient size mismatch");
    return s.matrix(x) * gh;
}

double compressibility(const BracketStructure& s, const GeneralizedEnergy& h, const Eigen::VectorXd& x) {
    check_dim(s, x);
    return s.divergence(x).dot(h.grad(x));
}

double jacobi_residual_classical(const BracketStructure& s, const ScalarField& a, const ScalarField& b,
                                 const ScalarField& c, const Eigen::VectorXd& x, double outer_step) {
    check_dim(s, x);
    auto inner = [&s](const ScalarField& u, const ScalarField& v) {
        return [&s, &u, &v](const Eigen::VectorXd& y) { return u.grad(y).dot(s.matrix(y) * v.grad(y)); };
    };
    auto outer_grad = [outer_step](const ScalarFn& f, const Eigen::VectorXd& y) {
        Eigen::VectorXd g(y.size());
        Eigen::VectorXd z = y;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double h = outer_step * (1.0 + std::abs(y[i]));
            z[i] = y[i] + h;
            const double fp = f(z);
            z[i] = y[i] - h;
            const double fm = f(z);
            z[i] = y[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        return g;
    };
    const Eigen::MatrixXd bx = s.matrix(x);
    auto outer = [&](const ScalarField& u, const ScalarFn& vw) { return u.grad(x).dot(bx * outer_grad(vw, x)); };
    return outer(a, inner(b, c)) + outer(c, inner(a, b)) + outer(b, inner(c, a));
}

}  // namespace nhbrack
