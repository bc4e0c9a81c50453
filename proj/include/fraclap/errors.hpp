#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

// Adaptive quadrature failed to reach the requested tolerance. Carries the
// best available estimate so callers can decide whether to keep it.
class QuadratureToleranceError : public std::runtime_error {
public:
    QuadratureToleranceError(const std::string& what, double estimate, double achieved_tol)
        : std::runtime_error(what), estimate_(estimate), achieved_tol_(achieved_tol) {}

    double estimate() const { return estimate_; }
    double achieved_tolerance() const { return achieved_tol_; }

private:
    double estimate_;
    double achieved_tol_;
};

// A geometric parameter request cannot be satisfied; carries the feasible bound.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(const std::string& what, double feasible_bound)
        : std::invalid_argument(what), feasible_bound_(feasible_bound) {}

    double feasible_bound() const { return feasible_bound_; }

private:
    double feasible_bound_;
};

}  // namespace fraclap
