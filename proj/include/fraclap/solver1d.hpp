#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>

#include "fraclap/assembly1d.hpp"
#include "fraclap/fields.hpp"
#include "fraclap/mesh1d.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

enum class SolutionProvenance { kDirect, kTraceOfExtension, kAnalytic };

// Galerkin solution of (-Delta)^s u = f on an interval with zero exterior
// condition. Coefficients are stored over all nodes with the endpoint values
// pinned to zero by construction.
struct DiscreteSolution {
    std::shared_ptr<const FemSpace1D> space;
    Eigen::VectorXd coeffs;  // size space->n_nodes(), endpoints zero
    FractionalParams params{0.5, 0.0, 1, 0.0, 1.0};
    SolutionProvenance provenance = SolutionProvenance::kDirect;
    double residual_norm = 0.0;
    double energy = 0.0;

    double eval(double x, int order = 0) const { return space->eval(coeffs, x, order); }
    std::shared_ptr<Field1D> as_field() const;
};

struct SolveOptions {
    AssemblyOptions assembly;
    int load_quad_points = 14;
    // Dense Cholesky below this size, conjugate gradients above.
    int dense_limit = 2000;
    double cg_tol = 1e-12;
};

// Solves the weak problem a(u,v) = (f,v) on the given mesh. The assembled
// form can be passed in to amortize it across solves on the same space.
DiscreteSolution solve_dirichlet_1d(const Field1D& f, const FractionalParams& params,
                                    const Mesh1D& mesh, int degree,
                                    const SolveOptions& opt = {});
DiscreteSolution solve_dirichlet_1d(const Field1D& f, const FractionalForm& form,
                                    const SolveOptions& opt = {});

// Default grading exponent: 2 for s <= 1/2, 3 otherwise.
double default_grading(double s);

struct ErrorNorms {
    double l2 = 0.0;
    double energy = 0.0;
    double linf_interior = 0.0;
};

// Quadrature L2 error, energy error through the assembled form (reference
// interpolated onto the mesh), and max error over the middle 80% of the
// interval.
ErrorNorms error_norms(const DiscreteSolution& uh, const Field1D& u_ref,
                       const FractionalForm* form = nullptr, int quad_points = 16);

}  // namespace fraclap
