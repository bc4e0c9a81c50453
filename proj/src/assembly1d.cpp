#include "fraclap/assembly1d.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclap/parallel.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

namespace {

// Identical elements K x K: with tau = x - z,
//   iint num |x-z|^{-1-2sigma} = 2 int_0^h tau^{nu-1-2sigma} [int (num/tau^nu) dx] dtau.
void same_element_points(double a, double b, double sigma, int vanish, int n_sing, int n_reg,
                         std::vector<PairPoint>& out) {
    const double h = b - a;
    const double exponent = vanish - 1.0 - 2.0 * sigma;
    const QuadratureRule tau_rule = gauss_jacobi(exponent, n_sing, 0.0, h);
    for (int k = 0; k < tau_rule.size(); ++k) {
        const double tau = tau_rule.nodes[k];
        const QuadratureRule x_rule = gauss_legendre(n_reg, a + tau, b);
        for (int m = 0; m < x_rule.size(); ++m) {
            const double x = x_rule.nodes[m];
            out.push_back({x, x - tau, 2.0 * tau_rule.weights[k] * x_rule.weights[m] /
                                           std::pow(tau, static_cast<double>(vanish))});
        }
    }
}

// Touching elements (a1,v) and (v,b2): Duffy split of the (u,w) square along
// the scaled diagonal; Gauss-Jacobi in the radial variable.
void adjacent_points(double a1, double v, double b2, double sigma, int vanish, int n_sing,
                     int n_reg, std::vector<PairPoint>& out) {
    const double h1 = v - a1;
    const double h2 = b2 - v;
    const double exponent = vanish - 2.0 * sigma;
    const QuadratureRule radial = gauss_jacobi(exponent, n_sing, 0.0, 1.0);
    const QuadratureRule trans = gauss_legendre(n_reg, 0.0, 1.0);
    // Both K1 x K2 and K2 x K1 contribute equally: factor 2.
    for (int k = 0; k < radial.size(); ++k) {
        const double r = radial.nodes[k];
        const double rpow = std::pow(r, static_cast<double>(vanish));
        for (int m = 0; m < trans.size(); ++m) {
            const double tau = trans.nodes[m];
            // Triangle w <= u: u = h1 r, w = h2 r tau
            {
                const double wgt = 2.0 * radial.weights[k] * trans.weights[m] * h1 * h2 *
                                   std::pow(h1 + h2 * tau, -1.0 - 2.0 * sigma) / rpow;
                out.push_back({v - h1 * r, v + h2 * r * tau, wgt});
            }
            // Triangle u < w: w = h2 r, u = h1 r tau
            {
                const double wgt = 2.0 * radial.weights[k] * trans.weights[m] * h1 * h2 *
                                   std::pow(h2 + h1 * tau, -1.0 - 2.0 * sigma) / rpow;
                out.push_back({v - h1 * r * tau, v + h2 * r, wgt});
            }
        }
    }
}

// Separated pair: tensor Gauss once the gap is comparable to the sizes,
// otherwise bisect the larger element toward the gap.
void separated_points(double a1, double b1, double a2, double b2, double sigma, int n_reg,
                      std::vector<PairPoint>& out, int depth = 0) {
    const double h1 = b1 - a1;
    const double h2 = b2 - a2;
    const double gap = a2 - b1;
    if (depth < 24 && gap < 0.7 * std::max(h1, h2)) {
        if (h1 >= h2) {
            const double m = 0.5 * (a1 + b1);
            separated_points(a1, m, a2, b2, sigma, n_reg, out, depth + 1);
            separated_points(m, b1, a2, b2, sigma, n_reg, out, depth + 1);
        } else {
            const double m = 0.5 * (a2 + b2);
            separated_points(a1, b1, a2, m, sigma, n_reg, out, depth + 1);
            separated_points(a1, b1, m, b2, sigma, n_reg, out, depth + 1);
        }
        return;
    }
    const QuadratureRule rx = gauss_legendre(n_reg, a1, b1);
    const QuadratureRule rz = gauss_legendre(n_reg, a2, b2);
    for (int i = 0; i < rx.size(); ++i)
        for (int j = 0; j < rz.size(); ++j) {
            const double x = rx.nodes[i];
            const double z = rz.nodes[j];
            out.push_back(
                {x, z, 2.0 * rx.weights[i] * rz.weights[j] * std::pow(z - x, -1.0 - 2.0 * sigma)});
        }
}

// Gauss-Jacobi for the right-endpoint weight (b-x)^alpha via reflection.
QuadratureRule gauss_jacobi_right(double alpha_exp, int n, double a, double b) {
    QuadratureRule r = gauss_jacobi(alpha_exp, n, a, b);
    for (double& x : r.nodes) x = a + b - x;
    return r;
}

}  // namespace

void singular_pair_points(double a1, double b1, double a2, double b2, double sigma,
                          int vanish_same, int vanish_adjacent, int n_sing, int n_reg,
                          std::vector<PairPoint>& out) {
    constexpr double tol = 1e-14;
    if (std::abs(a1 - a2) < tol * (1.0 + std::abs(a1)) &&
        std::abs(b1 - b2) < tol * (1.0 + std::abs(b1))) {
        same_element_points(a1, b1, sigma, vanish_same, n_sing, n_reg, out);
    } else if (std::abs(b1 - a2) < tol * (1.0 + std::abs(b1))) {
        adjacent_points(a1, b1, b2, sigma, vanish_adjacent, n_sing, n_reg, out);
    } else if (b1 < a2) {
        separated_points(a1, b1, a2, b2, sigma, n_reg, out);
    } else {
        throw std::invalid_argument("singular_pair_points: elements must be ordered");
    }
}

Eigen::MatrixXd assemble_fractional_stiffness(const FemSpace1D& space,
                                              const FractionalParams& params,
                                              const AssemblyOptions& opt) {
    const int q = space.degree;
    const LagrangeShape& shape = LagrangeShape::get(q);
    const int n_all = space.n_nodes();
    const int n_free = n_all - 2;
    if (n_free <= 0) throw std::invalid_argument("assemble_fractional_stiffness: empty space");
    const double s = params.s;
    const int n_sing = opt.n_sing > 0 ? opt.n_sing : q + 3;
    const int n_el = space.mesh.n_elements();
    const double mesh_a = space.mesh.a();
    const double mesh_b = space.mesh.b();

    // Pair (e1,e2), e1 <= e2, flattened into one deterministic index range.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n_el * (n_el + 1) / 2);
    for (int e1 = 0; e1 < n_el; ++e1)
        for (int e2 = e1; e2 < n_el; ++e2) pairs.emplace_back(e1, e2);

    const int nthreads = std::max(1, opt.n_threads);
    std::vector<Eigen::MatrixXd> partial(nthreads, Eigen::MatrixXd::Zero(n_all, n_all));

    parallel_for(nthreads, nthreads, [&](int tid) {
        Eigen::MatrixXd& A = partial[tid];
        std::vector<PairPoint> pts;
        const size_t lo = static_cast<size_t>(pairs.size()) * tid / nthreads;
        const size_t hi = static_cast<size_t>(pairs.size()) * (tid + 1) / nthreads;
        for (size_t pi = lo; pi < hi; ++pi) {
            const int e1 = pairs[pi].first;
            const int e2 = pairs[pi].second;
            pts.clear();
            singular_pair_points(space.mesh.nodes[e1], space.mesh.nodes[e1 + 1],
                                 space.mesh.nodes[e2], space.mesh.nodes[e2 + 1], s, 2, 2, n_sing,
                                 opt.n_reg, pts);
            // Union of the dofs supported on either element.
            std::vector<int> dofs;
            for (int i = 0; i <= q; ++i) dofs.push_back(space.global_index(e1, i));
            for (int j = 0; j <= q; ++j) {
                const int g = space.global_index(e2, j);
                if (e2 != e1 && !(e2 == e1 + 1 && j == 0)) dofs.push_back(g);
            }
            const int nd = static_cast<int>(dofs.size());
            Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nd, nd);
            std::vector<double> diff(nd);
            const double x0_1 = space.mesh.nodes[e1], h1 = space.mesh.h(e1);
            const double x0_2 = space.mesh.nodes[e2], h2 = space.mesh.h(e2);
            for (const PairPoint& pp : pts) {
                // Evaluate every union dof at x (element e1 side) and z (e2 side).
                const double tx = (pp.x - x0_1) / h1;
                const double tz = (pp.z - x0_2) / h2;
                const bool x_in_e1 = tx >= -1e-12 && tx <= 1.0 + 1e-12;
                const bool z_in_e2 = tz >= -1e-12 && tz <= 1.0 + 1e-12;
                for (int a = 0; a < nd; ++a) {
                    const int g = dofs[a];
                    double vx = 0.0, vz = 0.0;
                    // dof g as local index in e1 / e2 if applicable
                    const int l1 = g - e1 * q;
                    const int l2 = g - e2 * q;
                    if (x_in_e1 && l1 >= 0 && l1 <= q) vx = shape.eval(l1, tx, 0);
                    if (z_in_e2 && l2 >= 0 && l2 <= q) vz = shape.eval(l2, tz, 0);
                    // On identical pairs, z lies in e1 as well.
                    if (e1 == e2 && l1 >= 0 && l1 <= q) vz = shape.eval(l1, tz, 0);
                    diff[a] = vx - vz;
                }
                for (int a = 0; a < nd; ++a) {
                    if (diff[a] == 0.0) continue;
                    const double da = diff[a] * pp.w;
                    for (int b = a; b < nd; ++b) local(a, b) += da * diff[b];
                }
            }
            for (int a = 0; a < nd; ++a)
                for (int b = a; b < nd; ++b) {
                    A(dofs[a], dofs[b]) += local(a, b);
                    if (dofs[a] != dofs[b]) A(dofs[b], dofs[a]) += local(a, b);
                }
        }
    });

    Eigen::MatrixXd Afull = Eigen::MatrixXd::Zero(n_all, n_all);
    for (const auto& P : partial) Afull += P;
    Afull *= 0.5 * params.C_ds;

    // Exterior contribution: C * int phi_i phi_j rho, rho = ((x-a)^{-2s} + (b-x)^{-2s})/(2s).
    // On the two boundary elements every admissible dof vanishes at the
    // endpoint, so the integrand with the quadratic factored out is polynomial
    // and Gauss-Jacobi with exponent 2-2s is exact.
    const LagrangeShape& sh = shape;
    auto add_exterior = [&](bool left) {
        for (int e = 0; e < n_el; ++e) {
            const double x0 = space.mesh.nodes[e];
            const double h = space.mesh.h(e);
            const bool singular = left ? (e == 0) : (e == n_el - 1);
            QuadratureRule rule;
            if (singular) {
                rule = left ? gauss_jacobi(2.0 - 2.0 * s, q + 4, x0, x0 + h)
                            : gauss_jacobi_right(2.0 - 2.0 * s, q + 4, x0, x0 + h);
            } else {
                const int nq = (e <= 2 || e >= n_el - 3) ? 20 : 10;
                rule = gauss_legendre(nq, x0, x0 + h);
            }
            for (int i = 0; i <= q; ++i) {
                const int gi = space.global_index(e, i);
                if (gi == 0 || gi == n_all - 1) continue;
                for (int j = i; j <= q; ++j) {
                    const int gj = space.global_index(e, j);
                    if (gj == 0 || gj == n_all - 1) continue;
                    double acc = 0.0;
                    for (int k = 0; k < rule.size(); ++k) {
                        const double x = rule.nodes[k];
                        const double t = (x - x0) / h;
                        const double pij = sh.eval(i, t, 0) * sh.eval(j, t, 0);
                        const double dist = left ? (x - mesh_a) : (mesh_b - x);
                        double w = rule.weights[k];
                        if (singular) {
                            w *= pij / (dist * dist);
                        } else {
                            w *= pij * std::pow(dist, -2.0 * s);
                        }
                        acc += w;
                    }
                    acc *= params.C_ds / (2.0 * s);
                    Afull(gi, gj) += acc;
                    if (gi != gj) Afull(gj, gi) += acc;
                }
            }
        }
    };
    add_exterior(true);
    add_exterior(false);

    return Afull.block(1, 1, n_free, n_free);
}

FractionalForm::FractionalForm(FemSpace1D space, FractionalParams params, AssemblyOptions opt)
    : space_(std::move(space)), params_(params) {
    A_ = assemble_fractional_stiffness(space_, params_, opt);
    llt_.compute(A_);
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error("FractionalForm: matrix not positive definite (assembly bug)");
}

double FractionalForm::dual_norm(const Eigen::VectorXd& b_free) const {
    return std::sqrt(std::max(0.0, b_free.dot(llt_.solve(b_free))));
}

double FractionalForm::energy(const Eigen::VectorXd& v_free) const {
    return v_free.dot(A_ * v_free);
}

double FractionalForm::seminorm_hs_sq(const Eigen::VectorXd& v_free) const {
    return 2.0 / params_.C_ds * energy(v_free);
}

Eigen::VectorXd FractionalForm::solve(const Eigen::VectorXd& b_free) const {
    return llt_.solve(b_free);
}

Eigen::VectorXd FractionalForm::restrict_interior(const Eigen::VectorXd& full) const {
    return full.segment(1, full.size() - 2);
}

double slobodeckij_seminorm_sq(const std::function<double(double)>& f, const Mesh1D& panels,
                               double t, int n_sing, int n_reg) {
    double acc = 0.0;
    std::vector<PairPoint> pts;
    const int n_el = panels.n_elements();
    for (int e1 = 0; e1 < n_el; ++e1) {
        for (int e2 = e1; e2 < n_el; ++e2) {
            pts.clear();
            singular_pair_points(panels.nodes[e1], panels.nodes[e1 + 1], panels.nodes[e2],
                                 panels.nodes[e2 + 1], t, 2, 0, n_sing, n_reg, pts);
            double part = 0.0;
            for (const PairPoint& pp : pts) {
                const double d = f(pp.x) - f(pp.z);
                part += pp.w * d * d;
            }
            acc += part;
        }
    }
    return acc;
}

}  // namespace fraclap
