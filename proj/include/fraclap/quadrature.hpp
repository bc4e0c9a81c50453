#pragma once

#include <string>
#include <vector>

namespace fraclap {

// Gaussian rule on (a,b) for the weight (x-a)^weight_exponent.
// weight_exponent == 0 is plain Gauss-Legendre.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double weight_exponent = 0.0;
    double a = -1.0;
    double b = 1.0;

    int size() const { return static_cast<int>(nodes.size()); }
    // Highest polynomial degree integrated exactly against the weight.
    int exact_degree() const { return 2 * size() - 1; }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (int i = 0; i < size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// n-point Gauss-Legendre rule on (a,b).
QuadratureRule gauss_legendre(int n, double a, double b);

// n-point Gauss-Jacobi rule on (a,b) exact for (x-a)^alpha_exp * P_{2n-1}(x).
// Requires alpha_exp > -1.
QuadratureRule gauss_jacobi(double alpha_exp, int n, double a, double b);

// Process-wide memo of reference rules keyed by (alpha_exp, n); the returned
// rule is mapped onto (a,b).
const QuadratureRule& cached_gauss_jacobi(double alpha_exp, int n);

// Disk persistence for reference rules (one text file per key under dir).
void save_rule_to_disk(const std::string& dir, double alpha_exp, int n);
bool load_rule_from_disk(const std::string& dir, double alpha_exp, int n, QuadratureRule& out);

// Maps a reference rule on (0,1) with weight x^alpha to (a,b).
QuadratureRule map_rule_to(const QuadratureRule& ref01, double a, double b);

}  // namespace fraclap
