#pragma once

#include <optional>
#include <utility>

#include "fraclap/fields.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

struct PvOptions {
    // Splitting radius between the Taylor-regularized inner part and the outer
    // part. 0 selects min(1e-2 * width, dist(x, support edge)/4, resolution/2).
    double eps_split = 0.0;
    double tol = 1e-10;  // absolute tolerance of the adaptive outer quadrature
    int max_depth = 40;
    // Interval outside which u vanishes identically (zero extension). When
    // absent, u is taken as globally defined and the difference-form integrand
    // is truncated at |z - x| = test_mode_radius.
    std::optional<std::pair<double, double>> support;
    double test_mode_radius = 50.0;
};

// Pointwise principal-value evaluation of the integral fractional Laplacian,
//   C(d,s) P.V. int (u(x)-u(z)) / |x-z|^{1+2s} dz  (d = 1).
// The inner part over |x-z| < eps uses the symmetric Taylor regularization
// (2u(x)-u(x+t)-u(x-t)) / t^{1+2s}, integrable via a Gauss-Jacobi rule; the
// odd first-order term cancels by symmetry. The outer part uses adaptive
// quadrature, with the tail where u == 0 reduced to a closed form.
// Throws QuadratureToleranceError if the adaptive part stalls.
double pv_apply(const Field1D& u, double x, const FractionalParams& params,
                const PvOptions& opt = {});

}  // namespace fraclap
