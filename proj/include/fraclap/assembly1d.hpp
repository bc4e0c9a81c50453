#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "fraclap/mesh1d.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

struct PairPoint {
    double x;
    double z;
    double w;
};

// Quadrature points for  iint_{K1 x K2} num(x,z) |x-z|^{-1-2 sigma} dz dx
// (mirror pair K2 x K1 included for distinct elements). vanish_* is the order
// to which num vanishes at x = z; it selects the Gauss-Jacobi exponent of the
// Duffy-type transform on touching and identical pairs. Separated pairs are
// split recursively until the gap is comparable to the element sizes.
void singular_pair_points(double a1, double b1, double a2, double b2, double sigma,
                          int vanish_same, int vanish_adjacent, int n_sing, int n_reg,
                          std::vector<PairPoint>& out);

struct AssemblyOptions {
    int n_sing = 0;   // 0 -> degree + 3
    int n_reg = 8;    // tensor Gauss points per separated pair direction
    int n_threads = 1;
};

// Galerkin matrix of a(u,v) = C(1,s)/2 * iint (u(x)-u(z))(v(x)-v(z)) |x-z|^{-1-2s}
// over R x R for the conforming nodal basis vanishing at and outside the mesh
// endpoints. The exterior double integral reduces to a weighted L2 term with
// weight ((x-a)^{-2s} + (b-x)^{-2s})/(2s). Rows/columns are the interior nodes.
Eigen::MatrixXd assemble_fractional_stiffness(const FemSpace1D& space,
                                              const FractionalParams& params,
                                              const AssemblyOptions& opt = {});

// Assembled H~^s form on a mesh, with the Cholesky factor kept for dual norms.
class FractionalForm {
public:
    FractionalForm(FemSpace1D space, FractionalParams params, AssemblyOptions opt = {});

    const FemSpace1D& space() const { return space_; }
    const Eigen::MatrixXd& matrix() const { return A_; }
    int n_free() const { return static_cast<int>(A_.rows()); }

    // b_free -> sqrt(b^T A^{-1} b): discrete H^{-s} dual norm surrogate.
    double dual_norm(const Eigen::VectorXd& b_free) const;
    // coeffs over interior nodes -> a(v,v)
    double energy(const Eigen::VectorXd& v_free) const;
    // |v|_{H^s(R)}^2 = (2/C) a(v,v) for v vanishing outside the mesh.
    double seminorm_hs_sq(const Eigen::VectorXd& v_free) const;

    Eigen::VectorXd solve(const Eigen::VectorXd& b_free) const;

    // Strip the two endpoint entries from a full nodal vector.
    Eigen::VectorXd restrict_interior(const Eigen::VectorXd& full) const;

private:
    FemSpace1D space_;
    FractionalParams params_;
    Eigen::MatrixXd A_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Aronstein-Slobodeckij seminorm |f|_{H^t}^2 over the panel mesh interval by
// singular pair quadrature; valid for f smooth within panels (jumps across
// panel boundaries allowed for t < 1/2).
double slobodeckij_seminorm_sq(const std::function<double(double)>& f, const Mesh1D& panels,
                               double t, int n_sing = 14, int n_reg = 8);

}  // namespace fraclap
