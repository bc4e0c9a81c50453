#include "fraclap/extension.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fraclap/quadrature.hpp"

namespace fraclap {

namespace {

// Trace mesh on the padded box with Omega = (a,b) graded toward its endpoints
// (the trace inherits the r^s boundary behavior) and geometrically growing
// exterior cells; a and b are mesh nodes.
Mesh1D build_box_mesh(double a, double b, const ExtensionOptions& opt) {
    const double diam = b - a;
    const double pad = opt.box_pad * diam;
    std::vector<double> nodes;
    const Mesh1D inner = opt.grading > 1.0 ? graded_mesh(opt.n_omega, opt.grading, a, b)
                                           : uniform_mesh(opt.n_omega, a, b);
    const double h0 = diam / opt.n_omega;
    std::vector<double> left;
    double x = a;
    double h = h0;
    while (x > a - pad) {
        x -= h;
        left.push_back(std::max(x, a - pad));
        h *= opt.exterior_growth;
    }
    for (auto it = left.rbegin(); it != left.rend(); ++it) nodes.push_back(*it);
    for (double xn : inner.nodes) nodes.push_back(xn);
    x = b;
    h = h0;
    while (x < b + pad) {
        x += h;
        nodes.push_back(std::min(x, b + pad));
        h *= opt.exterior_growth;
    }
    Mesh1D m;
    m.nodes = std::move(nodes);
    return m;
}

// quadrature points over (0, min(Y,cut)) with the weight y^exponent folded
// into the weights; the cell at 0 uses Gauss-Jacobi so the weighted moments
// of polynomials are exact.
struct WeightedYRule {
    std::vector<double> y;
    std::vector<double> w;
};

WeightedYRule weighted_y_rule(const Mesh1D& ymesh, double exponent, int n, double cut) {
    WeightedYRule out;
    for (int cell = 0; cell < ymesh.n_elements(); ++cell) {
        double lo = ymesh.nodes[cell];
        double hi = std::min(ymesh.nodes[cell + 1], cut);
        if (hi <= lo) break;
        if (cell == 0) {
            const QuadratureRule r = gauss_jacobi(exponent, n, lo, hi);
            for (int i = 0; i < r.size(); ++i) {
                out.y.push_back(r.nodes[i]);
                out.w.push_back(r.weights[i]);
            }
        } else {
            const QuadratureRule r = gauss_legendre(n, lo, hi);
            for (int i = 0; i < r.size(); ++i) {
                out.y.push_back(r.nodes[i]);
                out.w.push_back(r.weights[i] * std::pow(r.nodes[i], exponent));
            }
        }
    }
    return out;
}

struct TensorSystem {
    Eigen::SparseMatrix<double> K;  // over all (ix,iy) dofs, iy-major per x node
    int nx = 0, nyn = 0;
    long index(int ix, int iy) const { return static_cast<long>(ix) * nyn + iy; }
};

TensorSystem build_tensor_system(const FemSpace1D& xs, const FemSpace1D& ys, double alpha) {
    TensorSystem sys;
    sys.nx = xs.n_nodes();
    sys.nyn = ys.n_nodes();
    const Eigen::SparseMatrix<double> Ax = stiffness_matrix(xs);
    const Eigen::SparseMatrix<double> Mx = mass_matrix(xs);
    const Eigen::SparseMatrix<double> Sy = weighted_stiffness_matrix(ys, alpha);
    const Eigen::SparseMatrix<double> My = weighted_mass_matrix(ys, alpha);
    std::vector<Eigen::Triplet<double>> trips;
    auto add_kron = [&](const Eigen::SparseMatrix<double>& X,
                        const Eigen::SparseMatrix<double>& Ym) {
        for (int kx = 0; kx < X.outerSize(); ++kx)
            for (Eigen::SparseMatrix<double>::InnerIterator itx(X, kx); itx; ++itx)
                for (int ky = 0; ky < Ym.outerSize(); ++ky)
                    for (Eigen::SparseMatrix<double>::InnerIterator ity(Ym, ky); ity; ++ity)
                        trips.emplace_back(sys.index(itx.row(), ity.row()),
                                           sys.index(itx.col(), ity.col()),
                                           itx.value() * ity.value());
    };
    add_kron(Ax, My);
    add_kron(Mx, Sy);
    sys.K.resize(static_cast<long>(sys.nx) * sys.nyn, static_cast<long>(sys.nx) * sys.nyn);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    return sys;
}

}  // namespace

double ExtensionField1D::eval(double x, double y, int dx, int dy) const {
    if (x < xspace->mesh.a() || x > xspace->mesh.b()) return 0.0;
    if (y < 0.0 || y > Y) return 0.0;
    const int ex = xspace->mesh.find_element(x);
    const int ey = ymesh.find_element(y);
    const double hx = xspace->mesh.h(ex);
    const double hy = ymesh.h(ey);
    const double tx = (x - xspace->mesh.nodes[ex]) / hx;
    const double ty = (y - ymesh.nodes[ey]) / hy;
    const LagrangeShape& sx = LagrangeShape::get(xspace->degree);
    const LagrangeShape& sy = LagrangeShape::get(1);
    if (dy > 1 || dx > xspace->degree) return 0.0;
    double acc = 0.0;
    for (int i = 0; i <= xspace->degree; ++i) {
        const double vx = sx.eval(i, tx, dx);
        if (vx == 0.0) continue;
        for (int j = 0; j <= 1; ++j) {
            const double vy = sy.eval(j, ty, dy);
            acc += coeffs(xspace->global_index(ex, i), ey + j) * vx * vy;
        }
    }
    return acc / (std::pow(hx, dx) * std::pow(hy, dy));
}

std::shared_ptr<Field1D> ExtensionField1D::trace_field() const {
    return make_fem_field(xspace, coeffs.col(0));
}

std::shared_ptr<Field1D> ExtensionField1D::y_slice(double y, int dy) const {
    auto self = std::make_shared<ExtensionField1D>(*this);
    auto family = [self, y, dy](double x, int order) { return self->eval(x, y, order, dy); };
    return std::make_shared<AnalyticField1D>(family, xspace->degree);
}

double ExtensionField1D::weighted_l2_sq(double cut) const {
    const WeightedYRule yr = weighted_y_rule(ymesh, params.alpha, 8, cut);
    double acc = 0.0;
    for (int ex = 0; ex < xspace->mesh.n_elements(); ++ex) {
        const QuadratureRule rx =
            gauss_legendre(xspace->degree + 2, xspace->mesh.nodes[ex], xspace->mesh.nodes[ex + 1]);
        for (int i = 0; i < rx.size(); ++i)
            for (size_t j = 0; j < yr.y.size(); ++j) {
                const double u = eval(rx.nodes[i], yr.y[j]);
                acc += rx.weights[i] * yr.w[j] * u * u;
            }
    }
    return acc;
}

double ExtensionField1D::weighted_grad_sq(double cut) const {
    return weighted_grad_sq_strip(xspace->mesh.a(), xspace->mesh.b(), cut);
}

double ExtensionField1D::weighted_grad_sq_strip(double x_lo, double x_hi, double y_cut) const {
    const WeightedYRule yr = weighted_y_rule(ymesh, params.alpha, 8, y_cut);
    double acc = 0.0;
    for (int ex = 0; ex < xspace->mesh.n_elements(); ++ex) {
        const double a = std::max(x_lo, xspace->mesh.nodes[ex]);
        const double b = std::min(x_hi, xspace->mesh.nodes[ex + 1]);
        if (b <= a) continue;
        const QuadratureRule rx = gauss_legendre(xspace->degree + 2, a, b);
        for (int i = 0; i < rx.size(); ++i)
            for (size_t j = 0; j < yr.y.size(); ++j) {
                const double ux = eval(rx.nodes[i], yr.y[j], 1, 0);
                const double uy = eval(rx.nodes[i], yr.y[j], 0, 1);
                acc += rx.weights[i] * yr.w[j] * (ux * ux + uy * uy);
            }
    }
    return acc;
}

namespace {

ExtensionField1D solve_common(const Field1D* f, const SlabField* F,
                              const FractionalParams& params, double a, double b,
                              const ExtensionOptions& opt, const Field1D* dirichlet_trace,
                              double box_a_override = 0.0, double box_b_override = 0.0) {
    ExtensionField1D out;
    out.params = params;
    out.omega_a = a;
    out.omega_b = b;
    out.Y = opt.Y > 0.0 ? opt.Y : 4.0 * (b - a);
    out.H = opt.H > 0.0 ? opt.H : 0.5 * out.Y;
    if (F != nullptr && out.H > out.Y)
        throw std::invalid_argument("solve_extension: truncation height Y below data height H");

    Mesh1D box = build_box_mesh(a, b, opt);
    if (box_b_override > box_a_override) {
        // Dirichlet-trace mode works on the explicit box without padding.
        box = uniform_mesh(opt.n_omega, box_a_override, box_b_override);
    }
    out.xspace = std::make_shared<FemSpace1D>(FemSpace1D{box, opt.degree_x});
    out.ymesh = geometric_mesh_towards_zero(out.Y, opt.y_first_fraction, opt.y_ratio);

    const FemSpace1D yspace{out.ymesh, 1};
    const TensorSystem sys = build_tensor_system(*out.xspace, yspace, params.alpha);
    const int nx = sys.nx;
    const int nyn = sys.nyn;

    // free-dof map
    std::vector<long> free_of(static_cast<size_t>(nx) * nyn, -1);
    std::vector<double> pinned(static_cast<size_t>(nx) * nyn, 0.0);
    const double tol = 1e-12 * (b - a);
    long n_free = 0;
    for (int ix = 0; ix < nx; ++ix) {
        const double xp = out.xspace->node_position(ix);
        for (int iy = 0; iy < nyn; ++iy) {
            const long g = sys.index(ix, iy);
            if (iy == nyn - 1) continue;  // truncation plane
            if (iy == 0) {
                if (dirichlet_trace != nullptr) {
                    pinned[g] = dirichlet_trace->value(xp);
                    continue;
                }
                const bool inside = xp > a + tol && xp < b - tol;
                if (!inside) continue;  // exterior trace constraint
            }
            free_of[g] = n_free++;
        }
    }

    // right-hand side over all dofs
    Eigen::VectorXd b_all = Eigen::VectorXd::Zero(static_cast<long>(nx) * nyn);
    if (f != nullptr && dirichlet_trace == nullptr) {
        const Eigen::VectorXd bl =
            load_vector(*out.xspace, [&](double x) {
                return (x >= a && x <= b) ? f->value(x) : 0.0;
            });
        for (int ix = 0; ix < nx; ++ix) b_all[sys.index(ix, 0)] += bl[ix];
    }
    if (F != nullptr) {
        const WeightedYRule yr = weighted_y_rule(out.ymesh, 0.0, opt.quad_y, out.H);
        const LagrangeShape& shx = LagrangeShape::get(opt.degree_x);
        const LagrangeShape& shy = LagrangeShape::get(1);
        for (int ex = 0; ex < box.n_elements(); ++ex) {
            const QuadratureRule rx =
                gauss_legendre(opt.degree_x + 2, box.nodes[ex], box.nodes[ex + 1]);
            for (int i = 0; i < rx.size(); ++i) {
                for (size_t jq = 0; jq < yr.y.size(); ++jq) {
                    const double Fv = F->value(rx.nodes[i], yr.y[jq]);
                    if (Fv == 0.0) continue;
                    const int ey = out.ymesh.find_element(yr.y[jq]);
                    const double ty =
                        (yr.y[jq] - out.ymesh.nodes[ey]) / out.ymesh.h(ey);
                    const double tx = (rx.nodes[i] - box.nodes[ex]) / box.h(ex);
                    for (int li = 0; li <= opt.degree_x; ++li)
                        for (int lj = 0; lj <= 1; ++lj)
                            b_all[sys.index(out.xspace->global_index(ex, li), ey + lj)] +=
                                rx.weights[i] * yr.w[jq] * Fv * shx.eval(li, tx, 0) *
                                shy.eval(lj, ty, 0);
                }
            }
        }
    }

    // restrict to the free dofs (with the Dirichlet lift on the rhs)
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    for (int k = 0; k < sys.K.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, k); it; ++it) {
            const long fr = free_of[it.row()];
            if (fr < 0) continue;
            const long fc = free_of[it.col()];
            if (fc >= 0)
                trips.emplace_back(fr, fc, it.value());
            else if (pinned[it.col()] != 0.0)
                rhs[fr] -= it.value() * pinned[it.col()];
        }
    for (long g = 0; g < b_all.size(); ++g)
        if (free_of[g] >= 0) rhs[free_of[g]] += b_all[g];

    Eigen::SparseMatrix<double> Kf(n_free, n_free);
    Kf.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(Kf);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solve_extension: system not positive definite (bug signal)");
    const Eigen::VectorXd u = llt.solve(rhs);
    out.residual = (Kf * u - rhs).norm();

    out.coeffs = Eigen::MatrixXd::Zero(nx, nyn);
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < nyn; ++iy) {
            const long g = sys.index(ix, iy);
            out.coeffs(ix, iy) = free_of[g] >= 0 ? u[free_of[g]] : pinned[g];
        }

    // energy through the full tensor form
    Eigen::VectorXd full(static_cast<long>(nx) * nyn);
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < nyn; ++iy) full[sys.index(ix, iy)] = out.coeffs(ix, iy);
    out.energy = full.dot(sys.K * full);
    return out;
}

}  // namespace

ExtensionField1D solve_extension_1d(const Field1D* f, const SlabField* F,
                                    const FractionalParams& params, double omega_a,
                                    double omega_b, const ExtensionOptions& opt) {
    return solve_common(f, F, params, omega_a, omega_b, opt, nullptr);
}

ExtensionField1D extend_dirichlet_trace_1d(const Field1D& g, const FractionalParams& params,
                                           double box_a, double box_b,
                                           const ExtensionOptions& opt) {
    return solve_common(nullptr, nullptr, params, box_a, box_b, opt, &g, box_a, box_b);
}

ExtensionField1D interpolate_slab_field(const SlabField& g, const FractionalParams& params,
                                        double omega_a, double omega_b,
                                        const ExtensionOptions& opt) {
    ExtensionField1D out;
    out.params = params;
    out.omega_a = omega_a;
    out.omega_b = omega_b;
    out.Y = opt.Y > 0.0 ? opt.Y : 4.0 * (omega_b - omega_a);
    out.H = opt.H > 0.0 ? opt.H : 0.5 * out.Y;
    out.xspace =
        std::make_shared<FemSpace1D>(FemSpace1D{build_box_mesh(omega_a, omega_b, opt), opt.degree_x});
    out.ymesh = geometric_mesh_towards_zero(out.Y, opt.y_first_fraction, opt.y_ratio);
    out.coeffs = Eigen::MatrixXd::Zero(out.nx(), out.ny());
    for (int ix = 0; ix < out.nx(); ++ix)
        for (int iy = 0; iy < out.ny(); ++iy)
            out.coeffs(ix, iy) = g.value(out.xspace->node_position(ix), out.ymesh.nodes[iy]);
    out.energy = out.weighted_grad_sq(out.Y);
    return out;
}

ExtensionField1D random_admissible_field(unsigned seed, const FractionalParams& params,
                                         double omega_a, double omega_b,
                                         const ExtensionOptions& opt) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int modes = 8;
    std::vector<double> amp(modes), freq(modes), phase(modes), decay(modes);
    for (int m = 0; m < modes; ++m) {
        amp[m] = gauss(rng) / (1.0 + m);
        freq[m] = (m + 1) * M_PI / (omega_b - omega_a);
        phase[m] = 2.0 * M_PI * unif(rng);
        decay[m] = 0.5 + m;
    }
    const double mid = 0.5 * (omega_a + omega_b);
    const double half = 0.5 * (omega_b - omega_a);
    auto bump = [mid, half](double x) {
        const double t = (x - mid) / half;
        const double g = 1.0 - t * t;
        return g > 0.0 ? g * g * g : 0.0;  // C^2 cutoff vanishing outside Omega
    };
    auto family = [=](double x, double y, int, int) {
        double acc = 0.0;
        for (int m = 0; m < modes; ++m)
            acc += amp[m] * std::sin(freq[m] * (x - omega_a) + phase[m]) * std::exp(-decay[m] * y);
        return bump(x) * acc;
    };
    AnalyticSlabField g(family, 0);
    return interpolate_slab_field(g, params, omega_a, omega_b, opt);
}

DiscreteSolution dtn_trace(const ExtensionField1D& U) {
    if (U.ny() < 4)
        throw std::invalid_argument("dtn_trace: need at least 3 y levels for extrapolation");
    const double s = U.params.s;
    const double beta = 2.0 - 2.0 * s;
    const double y0 = U.ymesh.nodes[0], y1 = U.ymesh.nodes[1], y2 = U.ymesh.nodes[2];
    // flux G_m = (U(.,y_{m+1}) - U(.,y_m)) / int_{y_m}^{y_{m+1}} t^{-alpha} dt
    const double W0 = (std::pow(y1, 2.0 * s) - std::pow(y0, 2.0 * s)) / (2.0 * s);
    const double W1 = (std::pow(y2, 2.0 * s) - std::pow(y1, 2.0 * s)) / (2.0 * s);
    const double m0 = 0.5 * (y0 + y1);
    const double m1 = 0.5 * (y1 + y2);
    const double r0 = std::pow(m0, beta);
    const double r1 = std::pow(m1, beta);

    // Omega part of the trace mesh
    const Mesh1D& box = U.xspace->mesh;
    std::vector<double> nodes;
    for (double xn : box.nodes)
        if (xn >= U.omega_a - 1e-12 && xn <= U.omega_b + 1e-12) nodes.push_back(xn);
    Mesh1D omega_mesh;
    omega_mesh.nodes = std::move(nodes);
    auto space = std::make_shared<FemSpace1D>(FemSpace1D{omega_mesh, U.xspace->degree});

    Eigen::VectorXd vals(space->n_nodes());
    for (int g = 0; g < space->n_nodes(); ++g) {
        const double x = space->node_position(g);
        const double G0 = (U.eval(x, y1) - U.eval(x, y0)) / W0;
        const double G1 = (U.eval(x, y2) - U.eval(x, y1)) / W1;
        const double flux = G0 - (G1 - G0) * r0 / (r1 - r0);
        vals[g] = -U.params.d_s * flux;
    }
    DiscreteSolution out;
    out.space = space;
    out.coeffs = vals;
    out.params = U.params;
    out.provenance = SolutionProvenance::kTraceOfExtension;
    return out;
}

double poincare_ratio(const ExtensionField1D& U, double H_cut) {
    const double en = U.energy > 0.0 ? U.energy : U.weighted_grad_sq(U.Y);
    if (!(en > 1e-300)) throw std::invalid_argument("poincare_ratio: zero-energy field");
    return std::sqrt(U.weighted_l2_sq(H_cut) / en);
}

TraceCheckResult trace_inequality_check(const ExtensionField1D& U) {
    TraceCheckResult out;
    FractionalForm form(*U.xspace, U.params);
    const Eigen::VectorXd trace = U.coeffs.col(0);
    const Eigen::VectorXd v = trace.segment(1, trace.size() - 2);
    out.seminorm_hs = std::sqrt(std::max(0.0, form.seminorm_hs_sq(v)));
    const double en = U.energy > 0.0 ? U.energy : U.weighted_grad_sq(U.Y);
    out.grad_norm = std::sqrt(std::max(0.0, en));
    out.ratio = out.grad_norm > 0.0 ? out.seminorm_hs / out.grad_norm : 0.0;
    return out;
}

double multiplicative_trace_ratio_profile(const std::function<double(double)>& v,
                                          const std::function<double(double)>& dv, double alpha,
                                          double cut, int quad_points) {
    const QuadratureRule r = gauss_jacobi(alpha, quad_points, 0.0, cut);
    double nv = 0.0, ndv = 0.0;
    for (int i = 0; i < r.size(); ++i) {
        nv += r.weights[i] * v(r.nodes[i]) * v(r.nodes[i]);
        ndv += r.weights[i] * dv(r.nodes[i]) * dv(r.nodes[i]);
    }
    const double v0 = v(0.0);
    const double denom = std::pow(std::sqrt(nv), 1.0 - alpha) * std::pow(std::sqrt(ndv), 1.0 + alpha) + nv;
    if (denom == 0.0) return 0.0;
    return v0 * v0 / denom;
}

MultiplicativeTraceResult multiplicative_trace_check(const ExtensionField1D& U, double cut) {
    MultiplicativeTraceResult out;
    out.cut = cut > 0.0 ? cut : 0.25 * U.H;
    const WeightedYRule yr = weighted_y_rule(U.ymesh, U.params.alpha, 8, out.cut);
    for (int ix = 0; ix < U.nx(); ++ix) {
        const double x = U.xspace->node_position(ix);
        double nv = 0.0, ndv = 0.0;
        for (size_t j = 0; j < yr.y.size(); ++j) {
            const double vy = U.eval(x, yr.y[j]);
            const double dvy = U.eval(x, yr.y[j], 0, 1);
            nv += yr.w[j] * vy * vy;
            ndv += yr.w[j] * dvy * dvy;
        }
        const double v0 = U.coeffs(ix, 0);
        const double denom =
            std::pow(std::sqrt(nv), 1.0 - U.params.alpha) *
                std::pow(std::sqrt(ndv), 1.0 + U.params.alpha) +
            nv;
        if (denom > 0.0) out.max_ratio = std::max(out.max_ratio, v0 * v0 / denom);
    }
    return out;
}

NCheckReport ncheck(const ExtensionField1D& U, const Field1D* f, const SlabField* F,
                    const FractionalForm& omega_form) {
    NCheckReport rep;
    rep.grad_energy = U.energy > 0.0 ? U.energy : U.weighted_grad_sq(U.Y);
    if (F != nullptr) {
        const WeightedYRule yr = weighted_y_rule(U.ymesh, -U.params.alpha, 8, U.H);
        double acc = 0.0;
        const Mesh1D& box = U.xspace->mesh;
        for (int ex = 0; ex < box.n_elements(); ++ex) {
            const QuadratureRule rx = gauss_legendre(4, box.nodes[ex], box.nodes[ex + 1]);
            for (int i = 0; i < rx.size(); ++i)
                for (size_t j = 0; j < yr.y.size(); ++j) {
                    const double Fv = F->value(rx.nodes[i], yr.y[j]);
                    acc += rx.weights[i] * yr.w[j] * Fv * Fv;
                }
        }
        rep.big_f_norm = std::sqrt(acc);
    }
    if (f != nullptr) {
        const Eigen::VectorXd bf =
            load_vector(omega_form.space(), [&](double x) { return f->value(x); });
        rep.f_dual_norm = omega_form.dual_norm(omega_form.restrict_interior(bf));
        // H^{1-s}(Omega) norm of f
        double l2 = 0.0;
        const Mesh1D& om = omega_form.space().mesh;
        for (int e = 0; e < om.n_elements(); ++e) {
            const QuadratureRule r = gauss_legendre(8, om.nodes[e], om.nodes[e + 1]);
            for (int i = 0; i < r.size(); ++i)
                l2 += r.weights[i] * f->value(r.nodes[i]) * f->value(r.nodes[i]);
        }
        const double semi = slobodeckij_seminorm_sq([&](double x) { return f->value(x); }, om,
                                                    1.0 - U.params.s, 10, 6);
        rep.f_h1ms_norm = std::sqrt(l2 + semi);
    }
    const double grad = std::sqrt(std::max(0.0, rep.grad_energy));
    rep.n_sq = grad * (grad + rep.big_f_norm + rep.f_h1ms_norm);
    const double data = rep.big_f_norm + rep.f_dual_norm;
    rep.apriori_ratio = data > 0.0 ? grad / data : 0.0;
    return rep;
}

ShiftProbeResult shift_theorem_probe(const ExtensionField1D& U, const Field1D* f,
                                     const SlabField* F, double t,
                                     const FractionalForm& omega_form) {
    if (!(t >= 0.0 && t < 0.5))
        throw std::invalid_argument("shift_theorem_probe: requires t in [0, 1/2)");
    ShiftProbeResult out;
    out.t = t;
    const WeightedYRule yr = weighted_y_rule(U.ymesh, U.params.alpha, 3, U.Y);
    const Mesh1D& box = U.xspace->mesh;
    double lhs = 0.0;
    for (size_t j = 0; j < yr.y.size(); ++j) {
        const double y = yr.y[j];
        auto gx = [&](double x) { return U.eval(x, y, 1, 0); };
        auto gy = [&](double x) { return U.eval(x, y, 0, 1); };
        double slice = 0.0;
        if (t == 0.0) {
            for (int e = 0; e < box.n_elements(); ++e) {
                const QuadratureRule r =
                    gauss_legendre(U.xspace->degree + 2, box.nodes[e], box.nodes[e + 1]);
                for (int i = 0; i < r.size(); ++i)
                    slice += r.weights[i] *
                             (gx(r.nodes[i]) * gx(r.nodes[i]) + gy(r.nodes[i]) * gy(r.nodes[i]));
            }
        } else {
            slice = slobodeckij_seminorm_sq(gx, box, t, 8, 5) +
                    slobodeckij_seminorm_sq(gy, box, t, 8, 5);
        }
        lhs += yr.w[j] * slice;
    }
    out.lhs = lhs;
    const NCheckReport rep = ncheck(U, f, F, omega_form);
    out.rhs_nsq = rep.n_sq;
    out.ratio = rep.n_sq > 0.0 ? lhs / rep.n_sq : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// d = 2 demonstrator
// ---------------------------------------------------------------------------

double ExtensionField2D::eval(Vec2 x, double y, int d1, int d2, int dy) const {
    const Mesh1D& m1 = xspace1->mesh;
    const Mesh1D& m2 = xspace2->mesh;
    if (x.x < m1.a() || x.x > m1.b() || x.y < m2.a() || x.y > m2.b() || y < 0 || y > Y)
        return 0.0;
    const int e1 = m1.find_element(x.x);
    const int e2 = m2.find_element(x.y);
    const int ey = ymesh.find_element(y);
    const double t1 = (x.x - m1.nodes[e1]) / m1.h(e1);
    const double t2 = (x.y - m2.nodes[e2]) / m2.h(e2);
    const double ty = (y - ymesh.nodes[ey]) / ymesh.h(ey);
    const LagrangeShape& s1 = LagrangeShape::get(xspace1->degree);
    const LagrangeShape& s2 = LagrangeShape::get(xspace2->degree);
    const LagrangeShape& sy = LagrangeShape::get(1);
    if (d1 > xspace1->degree || d2 > xspace2->degree || dy > 1) return 0.0;
    double acc = 0.0;
    for (int i = 0; i <= xspace1->degree; ++i) {
        const double v1 = s1.eval(i, t1, d1);
        if (v1 == 0.0) continue;
        for (int jdx = 0; jdx <= xspace2->degree; ++jdx) {
            const double v2 = s2.eval(jdx, t2, d2);
            if (v2 == 0.0) continue;
            for (int k = 0; k <= 1; ++k) {
                const double vy = sy.eval(k, ty, dy);
                acc += coeffs[index(xspace1->global_index(e1, i), xspace2->global_index(e2, jdx),
                                    ey + k)] *
                       v1 * v2 * vy;
            }
        }
    }
    return acc / (std::pow(m1.h(e1), d1) * std::pow(m2.h(e2), d2) * std::pow(ymesh.h(ey), dy));
}

double ExtensionField2D::weighted_grad_sq(double y_cut) const {
    const WeightedYRule yr = weighted_y_rule(ymesh, params.alpha, 6, y_cut);
    double acc = 0.0;
    const Mesh1D& m1 = xspace1->mesh;
    const Mesh1D& m2 = xspace2->mesh;
    for (int e1 = 0; e1 < m1.n_elements(); ++e1) {
        const QuadratureRule r1 = gauss_legendre(3, m1.nodes[e1], m1.nodes[e1 + 1]);
        for (int e2 = 0; e2 < m2.n_elements(); ++e2) {
            const QuadratureRule r2 = gauss_legendre(3, m2.nodes[e2], m2.nodes[e2 + 1]);
            for (int i = 0; i < r1.size(); ++i)
                for (int jdx = 0; jdx < r2.size(); ++jdx)
                    for (size_t k = 0; k < yr.y.size(); ++k) {
                        const Vec2 p{r1.nodes[i], r2.nodes[jdx]};
                        const double g1 = eval(p, yr.y[k], 1, 0, 0);
                        const double g2 = eval(p, yr.y[k], 0, 1, 0);
                        const double g3 = eval(p, yr.y[k], 0, 0, 1);
                        acc += r1.weights[i] * r2.weights[jdx] * yr.w[k] *
                               (g1 * g1 + g2 * g2 + g3 * g3);
                    }
        }
    }
    return acc;
}

ExtensionField2D solve_extension_2d(const Polygon& domain,
                                    const std::function<double(Vec2)>& f,
                                    const FractionalParams& params,
                                    const Extension2DOptions& opt) {
    ExtensionField2D out;
    out.params = params;
    out.domain = domain;
    Vec2 lo, hi;
    domain.bounding_box(lo, hi);
    const double diam = domain.diameter();
    const double pad = opt.box_pad * diam;
    out.Y = opt.Y > 0.0 ? opt.Y : 2.0 * diam;
    out.H = 0.5 * out.Y;
    out.xspace1 = std::make_shared<FemSpace1D>(
        FemSpace1D{uniform_mesh(opt.n_cells, lo.x - pad, hi.x + pad), opt.degree});
    out.xspace2 = std::make_shared<FemSpace1D>(
        FemSpace1D{uniform_mesh(opt.n_cells, lo.y - pad, hi.y + pad), opt.degree});
    out.ymesh = geometric_mesh_towards_zero(out.Y, opt.y_first_fraction, opt.y_ratio);

    const FemSpace1D yspace{out.ymesh, 1};
    const Eigen::SparseMatrix<double> A1 = stiffness_matrix(*out.xspace1);
    const Eigen::SparseMatrix<double> M1 = mass_matrix(*out.xspace1);
    const Eigen::SparseMatrix<double> A2 = stiffness_matrix(*out.xspace2);
    const Eigen::SparseMatrix<double> M2 = mass_matrix(*out.xspace2);
    const Eigen::SparseMatrix<double> Sy = weighted_stiffness_matrix(yspace, params.alpha);
    const Eigen::SparseMatrix<double> My = weighted_mass_matrix(yspace, params.alpha);

    const int n1 = out.n1(), n2 = out.n2(), nyn = out.nyn();
    const long n_all = static_cast<long>(n1) * n2 * nyn;

    // node support inside the closed polygon? (first-order geometry test)
    auto trace_node_free = [&](int i1, int i2) {
        const Mesh1D& m1 = out.xspace1->mesh;
        const Mesh1D& m2 = out.xspace2->mesh;
        const int q1 = out.xspace1->degree, q2 = out.xspace2->degree;
        const int e1l = std::max(0, (i1 - 1) / q1), e1r = std::min(m1.n_elements() - 1, i1 / q1);
        const int e2l = std::max(0, (i2 - 1) / q2), e2r = std::min(m2.n_elements() - 1, i2 / q2);
        const double xa = m1.nodes[e1l], xb = m1.nodes[e1r + 1];
        const double ya = m2.nodes[e2l], yb = m2.nodes[e2r + 1];
        for (int a = 0; a <= 2; ++a)
            for (int bb = 0; bb <= 2; ++bb) {
                const Vec2 p{xa + 0.5 * a * (xb - xa), ya + 0.5 * bb * (yb - ya)};
                if (!domain.contains(p, 1e-12 * diam)) return false;
            }
        return true;
    };

    std::vector<long> free_of(n_all, -1);
    long n_free = 0;
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2)
            for (int iy = 0; iy < nyn; ++iy) {
                if (iy == nyn - 1) continue;
                if (iy == 0 && !trace_node_free(i1, i2)) continue;
                free_of[out.index(i1, i2, iy)] = n_free++;
            }

    // K = (A1 x M2 + M1 x A2) x My + (M1 x M2) x Sy restricted to free dofs
    std::vector<Eigen::Triplet<double>> trips;
    auto add3 = [&](const Eigen::SparseMatrix<double>& X1, const Eigen::SparseMatrix<double>& X2,
                    const Eigen::SparseMatrix<double>& Xy) {
        for (int k1 = 0; k1 < X1.outerSize(); ++k1)
            for (Eigen::SparseMatrix<double>::InnerIterator it1(X1, k1); it1; ++it1)
                for (int k2 = 0; k2 < X2.outerSize(); ++k2)
                    for (Eigen::SparseMatrix<double>::InnerIterator it2(X2, k2); it2; ++it2)
                        for (int ky = 0; ky < Xy.outerSize(); ++ky)
                            for (Eigen::SparseMatrix<double>::InnerIterator ity(Xy, ky); ity;
                                 ++ity) {
                                const long r = free_of[out.index(it1.row(), it2.row(), ity.row())];
                                const long c = free_of[out.index(it1.col(), it2.col(), ity.col())];
                                if (r >= 0 && c >= 0)
                                    trips.emplace_back(r, c,
                                                       it1.value() * it2.value() * ity.value());
                            }
    };
    add3(A1, M2, My);
    add3(M1, A2, My);
    add3(M1, M2, Sy);

    Eigen::SparseMatrix<double> K(n_free, n_free);
    K.setFromTriplets(trips.begin(), trips.end());

    // rhs: trace data integrated over the polygon (points outside are dropped)
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    const Mesh1D& m1 = out.xspace1->mesh;
    const Mesh1D& m2 = out.xspace2->mesh;
    const LagrangeShape& s1 = LagrangeShape::get(opt.degree);
    for (int e1 = 0; e1 < m1.n_elements(); ++e1) {
        const QuadratureRule r1 = gauss_legendre(opt.quad + opt.degree, m1.nodes[e1], m1.nodes[e1 + 1]);
        for (int e2 = 0; e2 < m2.n_elements(); ++e2) {
            const QuadratureRule r2 =
                gauss_legendre(opt.quad + opt.degree, m2.nodes[e2], m2.nodes[e2 + 1]);
            for (int i = 0; i < r1.size(); ++i)
                for (int jdx = 0; jdx < r2.size(); ++jdx) {
                    const Vec2 p{r1.nodes[i], r2.nodes[jdx]};
                    if (!domain.contains(p)) continue;
                    const double fv = f(p) * r1.weights[i] * r2.weights[jdx];
                    const double t1 = (p.x - m1.nodes[e1]) / m1.h(e1);
                    const double t2 = (p.y - m2.nodes[e2]) / m2.h(e2);
                    for (int li = 0; li <= opt.degree; ++li)
                        for (int lj = 0; lj <= opt.degree; ++lj) {
                            const long g = free_of[out.index(out.xspace1->global_index(e1, li),
                                                             out.xspace2->global_index(e2, lj), 0)];
                            if (g >= 0) rhs[g] += fv * s1.eval(li, t1, 0) * s1.eval(lj, t2, 0);
                        }
                }
        }
    }

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(K);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solve_extension_2d: system not positive definite");
    const Eigen::VectorXd u = llt.solve(rhs);
    out.residual = (K * u - rhs).norm();
    out.coeffs = Eigen::VectorXd::Zero(n_all);
    for (long g = 0; g < n_all; ++g)
        if (free_of[g] >= 0) out.coeffs[g] = u[free_of[g]];
    out.energy = -1.0;  // computed on demand through weighted_grad_sq
    return out;
}

}  // namespace fraclap
