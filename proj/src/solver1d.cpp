#include "fraclap/solver1d.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <stdexcept>

#include "fraclap/quadrature.hpp"

namespace fraclap {

std::shared_ptr<Field1D> DiscreteSolution::as_field() const {
    return make_fem_field(space, coeffs);
}

double default_grading(double s) { return s <= 0.5 ? 2.0 : 3.0; }

DiscreteSolution solve_dirichlet_1d(const Field1D& f, const FractionalForm& form,
                                    const SolveOptions& opt) {
    const FemSpace1D& space = form.space();
    Eigen::VectorXd b_full =
        load_vector(space, [&](double x) { return f.value(x); }, opt.load_quad_points);
    Eigen::VectorXd b = form.restrict_interior(b_full);

    Eigen::VectorXd u_free;
    if (form.n_free() <= opt.dense_limit) {
        u_free = form.solve(b);
    } else {
        Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(opt.cg_tol);
        cg.compute(form.matrix());
        u_free = cg.solve(b);
        if (cg.info() != Eigen::Success)
            throw std::runtime_error("solve_dirichlet_1d: conjugate gradients did not converge");
    }

    DiscreteSolution sol;
    sol.space = std::make_shared<FemSpace1D>(space);
    sol.coeffs = Eigen::VectorXd::Zero(space.n_nodes());
    sol.coeffs.segment(1, form.n_free()) = u_free;
    sol.residual_norm = (form.matrix() * u_free - b).norm();
    sol.energy = u_free.dot(form.matrix() * u_free);
    sol.provenance = SolutionProvenance::kDirect;
    return sol;
}

DiscreteSolution solve_dirichlet_1d(const Field1D& f, const FractionalParams& params,
                                    const Mesh1D& mesh, int degree, const SolveOptions& opt) {
    FractionalForm form(FemSpace1D{mesh, degree}, params, opt.assembly);
    DiscreteSolution sol = solve_dirichlet_1d(f, form, opt);
    sol.params = params;
    return sol;
}

ErrorNorms error_norms(const DiscreteSolution& uh, const Field1D& u_ref,
                       const FractionalForm* form, int quad_points) {
    const FemSpace1D& space = *uh.space;
    ErrorNorms out;

    double l2sq = 0.0;
    for (int e = 0; e < space.mesh.n_elements(); ++e) {
        const QuadratureRule rule =
            gauss_legendre(quad_points, space.mesh.nodes[e], space.mesh.nodes[e + 1]);
        for (int k = 0; k < rule.size(); ++k) {
            const double d = uh.eval(rule.nodes[k]) - u_ref.value(rule.nodes[k]);
            l2sq += rule.weights[k] * d * d;
        }
    }
    out.l2 = std::sqrt(l2sq);

    if (form != nullptr) {
        Eigen::VectorXd ref =
            interpolate(space, [&](double x) { return u_ref.value(x); });
        ref[0] = 0.0;
        ref[space.n_nodes() - 1] = 0.0;
        Eigen::VectorXd diff = uh.coeffs - ref;
        out.energy = std::sqrt(std::max(0.0, form->energy(form->restrict_interior(diff))));
    }

    const double a = space.mesh.a(), b = space.mesh.b();
    const double lo = a + 0.1 * (b - a), hi = b - 0.1 * (b - a);
    double linf = 0.0;
    const int n_samples = 1000;
    for (int i = 0; i <= n_samples; ++i) {
        const double x = lo + (hi - lo) * i / n_samples;
        linf = std::max(linf, std::abs(uh.eval(x) - u_ref.value(x)));
    }
    out.linf_interior = linf;
    return out;
}

}  // namespace fraclap
