#pragma once

namespace fraclap {

// Kernel normalization of the integral fractional Laplacian,
//   C(d,s) = -2^{2s} Gamma(s+d/2) / (pi^{d/2} Gamma(-s)),
// evaluated via log-Gamma with the reflection formula for Gamma(-s).
// Positive for s in (0,1). Throws std::domain_error outside.
double kernel_constant(int d, double s);

// Dirichlet-to-Neumann normalization d_s = 2^{2s-1} Gamma(s)/Gamma(1-s).
double dtn_constant(double s);

// Constant value of (-Delta)^s (1-|x|^2)_+^s on the unit ball in R^d:
//   2^{2s} Gamma(1+s) Gamma(s+d/2) / Gamma(d/2).
double getoor_constant(int d, double s);

// Bundle of the fixed fractional-order data used across the solvers.
struct FractionalParams {
    double s;      // order in (0,1)
    double alpha;  // extension weight exponent, alpha = 1 - 2s
    int d;         // trace dimension (1 or 2)
    double C_ds;   // kernel constant C(d,s)
    double d_s;    // DtN constant

    static FractionalParams make(double s, int d);
};

}  // namespace fraclap
