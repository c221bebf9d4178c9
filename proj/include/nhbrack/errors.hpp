// errors.hpp: exception types shared across the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhbrack {

// Shapes that do not fit together: vector lengths, matrix sizes, grids.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation requested on data that cannot support it (e.g. derivatives of a
// single-point operator field).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Adiabatic energies closer than the degeneracy tolerance.
class DegeneracyError : public std::runtime_error {
public:
    DegeneracyError(const std::string& what, double r, double gap)
        : std::runtime_error(what), r_(r), gap_(gap) {}
    double r() const noexcept { return r_; }
    double gap() const noexcept { return gap_; }

private:
    double r_;
    double gap_;
};

// Grid does not cover the region a construction needs.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite state produced during time stepping.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Time step violates the advection or phase-rotation stability limits.
class CflError : public std::runtime_error {
public:
    CflError(const std::string& what, double suggested_dt)
        : std::runtime_error(what + "; suggested dt <= " + std::to_string(suggested_dt)),
          suggested_dt_(suggested_dt) {}
    double suggested_dt() const noexcept { return suggested_dt_; }

private:
    double suggested_dt_;
};

}  // namespace nhbrack
