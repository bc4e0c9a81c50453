#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <vector>

#include "fraclap/fields.hpp"

namespace fraclap {

struct Mesh1D {
    std::vector<double> nodes;  // element boundaries, strictly ascending

    int n_elements() const { return static_cast<int>(nodes.size()) - 1; }
    double a() const { return nodes.front(); }
    double b() const { return nodes.back(); }
    double length() const { return b() - a(); }
    double h(int e) const { return nodes[e + 1] - nodes[e]; }
    double h_min() const;
    double h_max() const;
    int find_element(double x) const;  // clamped to [0, n_elements()-1]
};

Mesh1D uniform_mesh(int n, double a, double b);

// Mesh with nodes clustered at both endpoints, symmetric about the midpoint:
// on the left half x_k = a + (b-a)/2 * (2k/n)^beta, mirrored on the right.
// beta = 1 gives the uniform mesh. Requires n >= 2, beta >= 1.
Mesh1D graded_mesh(int n, double beta, double a, double b);

// Geometric mesh on (0, Y) refined toward 0: first interval ~ first_fraction*Y,
// consecutive intervals growing by the given ratio.
Mesh1D geometric_mesh_towards_zero(double Y, double first_fraction = 1e-3, double ratio = 2.0);

// Lagrange shape functions of degree q on [0,1] with equispaced local nodes.
class LagrangeShape {
public:
    explicit LagrangeShape(int degree);
    int degree() const { return degree_; }
    // derivative of shape i at local coordinate t (order 0 = value)
    double eval(int i, double t, int order) const;

    static const LagrangeShape& get(int degree);  // cached, degrees 1..4

private:
    int degree_;
    Eigen::MatrixXd coeffs_;  // monomial coefficients, one column per shape
};

// Continuous nodal finite element space on a 1D mesh.
struct FemSpace1D {
    Mesh1D mesh;
    int degree = 1;

    int n_nodes() const { return mesh.n_elements() * degree + 1; }
    int global_index(int e, int iloc) const { return e * degree + iloc; }
    double node_position(int g) const;
    std::vector<double> all_node_positions() const;

    // Evaluate a full coefficient vector (size n_nodes) at x; zero outside.
    double eval(const Eigen::VectorXd& coeffs, double x, int order = 0) const;
};

// Element matrices with optional weight (x - x_sing)^alpha where x_sing is the
// left mesh endpoint; the element touching x_sing is integrated with a
// Gauss-Jacobi rule so the weighted entries are exact on polynomials.
Eigen::SparseMatrix<double> mass_matrix(const FemSpace1D& space);
Eigen::SparseMatrix<double> stiffness_matrix(const FemSpace1D& space);
Eigen::SparseMatrix<double> weighted_mass_matrix(const FemSpace1D& space, double alpha);
Eigen::SparseMatrix<double> weighted_stiffness_matrix(const FemSpace1D& space, double alpha);

// L2 load vector int f(x) phi_i(x) dx with per-element Gauss quadrature.
Eigen::VectorXd load_vector(const FemSpace1D& space, const std::function<double(double)>& f,
                            int quad_points = 12);

// Nodal interpolation of a function onto the space.
Eigen::VectorXd interpolate(const FemSpace1D& space, const std::function<double(double)>& f);

// View a coefficient vector as a Field1D (zero extension outside the mesh).
std::shared_ptr<Field1D> make_fem_field(std::shared_ptr<const FemSpace1D> space,
                                        Eigen::VectorXd coeffs);

}  // namespace fraclap
