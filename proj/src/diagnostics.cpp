#include "fraclap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "fraclap/quadrature.hpp"

namespace fraclap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LadderSum {
    double value = 0.0;
    double ratio = 0.0;   // last panel-sum ratio
    bool divergent = false;
};

// Sum panel contributions S_k over a geometric ladder toward 0, detect
// non-decay, and extrapolate the geometric remainder.
template <class PanelFn>
LadderSum geometric_ladder(double top, double stop, double divergence_ratio, int max_panels,
                           PanelFn&& panel) {
    LadderSum out;
    double prev = -1.0;
    double last = 0.0;
    double hi = top;
    int k = 0;
    std::vector<double> sums;
    while (hi > stop && k < max_panels) {
        const double lo = std::max(stop, 0.5 * hi);
        const double s = panel(lo, hi);
        out.value += s;
        sums.push_back(s);
        if (prev >= 0.0 && prev > 0.0) out.ratio = s / prev;
        prev = s;
        last = s;
        hi = lo;
        ++k;
        // early exit once the remainder is negligible
        if (out.ratio > 0.0 && out.ratio < 0.9 && last < 1e-17 * std::max(out.value, 1e-300))
            break;
    }
    // estimate the decay from the trailing panels
    if (sums.size() >= 4) {
        double r = 0.0;
        int cnt = 0;
        for (size_t i = sums.size() - 3; i < sums.size(); ++i)
            if (sums[i - 1] > 0.0) {
                r += sums[i] / sums[i - 1];
                ++cnt;
            }
        if (cnt > 0) out.ratio = r / cnt;
    }
    if (out.ratio >= divergence_ratio && last > 0.0) {
        out.divergent = true;
        out.value = kInf;
        return out;
    }
    if (out.ratio > 0.0 && out.ratio < 1.0 && hi <= stop * (1 + 1e-12) && stop <= 0.0) {
        // ladder ran to zero; nothing left
    } else if (out.ratio > 0.0 && out.ratio < 1.0 && last > 0.0) {
        out.value += last * out.ratio / (1.0 - out.ratio);
    }
    return out;
}

}  // namespace

WeightedNormResult weighted_norm_interval(const Field1D& u, double L, int p, double exp_v,
                                          const LadderOptions& opt) {
    if (p > u.max_order())
        throw std::invalid_argument("weighted_norm_interval: derivative order above p_max");
    WeightedNormResult out;
    const double res = u.resolution();
    const double stop = std::max(opt.floor, res > 0.0 ? 0.5 * res : 0.0);

    auto panel = [&](double lo, double hi) {
        const QuadratureRule r = gauss_legendre(opt.quad, lo, hi);
        double acc = 0.0;
        for (int i = 0; i < r.size(); ++i) {
            const double d = u.derivative(r.nodes[i], p);
            acc += r.weights[i] * std::pow(r.nodes[i], 2.0 * exp_v) * d * d;
        }
        return acc;
    };
    LadderSum ls =
        geometric_ladder(L, stop, opt.divergence_ratio, opt.max_panels, panel);
    out.panel_ratio = ls.ratio;
    if (ls.divergent) {
        out.divergent = true;
        out.value = kInf;
        return out;
    }
    double total = ls.value;
    // discrete fields: integrate the final stretch [0, stop] exactly
    if (res > 0.0 && stop > opt.floor) {
        if (p == 0) {
            // admissible discrete fields vanish at 0; factor the quadratic zero
            if (2.0 * exp_v + 2.0 > -1.0 + 1e-12) {
                const QuadratureRule r = gauss_jacobi(2.0 * exp_v + 2.0, opt.quad, 0.0, stop);
                for (int i = 0; i < r.size(); ++i) {
                    const double q = u.value(r.nodes[i]) / r.nodes[i];
                    total += r.weights[i] * q * q;
                }
            } else {
                out.divergent = true;
                out.value = kInf;
                return out;
            }
        } else {
            if (2.0 * exp_v > -1.0 + 1e-12) {
                const QuadratureRule r = gauss_jacobi(2.0 * exp_v, opt.quad, 0.0, stop);
                for (int i = 0; i < r.size(); ++i) {
                    const double d = u.derivative(r.nodes[i], p);
                    total += r.weights[i] * d * d;
                }
            } else {
                out.divergent = true;
                out.value = kInf;
                return out;
            }
        }
    }
    out.value = std::sqrt(total);
    return out;
}

WeightedNormResult weighted_norm_vertex_1d(const Field1D& u, double L, int p, double eps, double s,
                                           const LadderOptions& opt) {
    return weighted_norm_interval(u, L, p, p - 0.5 - s + eps, opt);
}

// ---------------------------------------------------------------------------
// Plane fields
// ---------------------------------------------------------------------------

namespace {

class CornerPowerField final : public PlaneField {
public:
    CornerPowerField(Vec2 v, double theta0, double kappa) : v_(v), th0_(theta0), kappa_(kappa) {}

    double derivative(Vec2 p, int d1, int d2) const override {
        using cplx = std::complex<double>;
        const cplx w(p.x - v_.x, p.y - v_.y);
        if (std::abs(w) == 0.0) return 0.0;
        const int q = d1 + d2;
        double fall = 1.0;
        for (int k = 0; k < q; ++k) fall *= (kappa_ - k);
        const cplx rot = std::polar(1.0, -th0_ * kappa_);
        // d^{d1}_x d^{d2}_y Im(rot w^kappa) = Im(rot fall i^{d2} w^{kappa-q})
        const cplx ipow = std::polar(1.0, 0.5 * M_PI * d2);
        const cplx val = rot * fall * ipow * std::pow(w, cplx(kappa_ - q, 0.0));
        return val.imag();
    }
    int max_order() const override { return 40; }

private:
    Vec2 v_;
    double th0_;
    double kappa_;
};

class ProductField final : public PlaneField {
public:
    ProductField(std::shared_ptr<Field1D> g, std::shared_ptr<Field1D> h)
        : g_(std::move(g)), h_(std::move(h)) {}
    double derivative(Vec2 p, int d1, int d2) const override {
        return g_->derivative(p.x, d1) * h_->derivative(p.y, d2);
    }
    int max_order() const override { return std::min(g_->max_order(), h_->max_order()); }

private:
    std::shared_ptr<Field1D> g_;
    std::shared_ptr<Field1D> h_;
};

class TracePlaneField final : public PlaneField {
public:
    explicit TracePlaneField(std::shared_ptr<const ExtensionField2D> U) : U_(std::move(U)) {}
    double derivative(Vec2 p, int d1, int d2) const override {
        return U_->eval(p, 0.0, d1, d2, 0);
    }
    int max_order() const override {
        return std::min(U_->xspace1->degree, U_->xspace2->degree);
    }
    double resolution() const override {
        return std::min(U_->xspace1->mesh.h_min(), U_->xspace2->mesh.h_min());
    }

private:
    std::shared_ptr<const ExtensionField2D> U_;
};

long binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::lround(r);
}

}  // namespace

std::shared_ptr<PlaneField> corner_power_field(Vec2 vertex, double theta0, double kappa) {
    return std::make_shared<CornerPowerField>(vertex, theta0, kappa);
}

std::shared_ptr<PlaneField> product_field(std::shared_ptr<Field1D> g,
                                          std::shared_ptr<Field1D> h) {
    return std::make_shared<ProductField>(std::move(g), std::move(h));
}

std::shared_ptr<PlaneField> trace_plane_field(std::shared_ptr<const ExtensionField2D> U) {
    return std::make_shared<TracePlaneField>(std::move(U));
}

double rotated_derivative(const PlaneField& u, Vec2 p, Vec2 tangent, Vec2 normal, int p_perp,
                          int p_par) {
    double acc = 0.0;
    for (int i = 0; i <= p_par; ++i) {
        const double ct = binom(p_par, i) * std::pow(tangent.x, i) *
                          std::pow(tangent.y, p_par - i);
        for (int j = 0; j <= p_perp; ++j) {
            const double cn = binom(p_perp, j) * std::pow(normal.x, j) *
                              std::pow(normal.y, p_perp - j);
            acc += ct * cn * u.derivative(p, i + j, (p_par - i) + (p_perp - j));
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// 2D weighted norms on the decomposition regions
// ---------------------------------------------------------------------------

namespace {

// angular extent of omega_v around vertex i: [theta_lo, theta_hi] measured in
// global coordinates, using rho = sin(angle to the incident edges)
void sector_bounds(const NeighborhoodDecomposition& dec, int vertex, double& th_lo,
                   double& th_hi) {
    const Polygon& poly = dec.polygon();
    const double xi = dec.xi();
    const auto edges = poly.edges_at_vertex(vertex);
    // incoming edge (prev) direction away from the vertex and outgoing edge
    const Vec2 v = poly.vertex(vertex);
    const Vec2 d_out = (poly.vertex((vertex + 1) % poly.n()) - v).normalized();
    const Vec2 d_in = (poly.vertex((vertex + poly.n() - 1) % poly.n()) - v).normalized();
    (void)edges;
    const double a_out = std::atan2(d_out.y, d_out.x);
    double opening = poly.interior_angle(vertex);
    const double margin = std::asin(std::min(1.0, xi));
    th_lo = a_out + margin;
    th_hi = a_out + opening - margin;
    (void)d_in;
}

}  // namespace

WeightedNormResult weighted_norm_sector(const NeighborhoodDecomposition& dec, int vertex,
                                        const PlaneField& u, int p, double exp_v,
                                        const LadderOptions& opt) {
    if (p > u.max_order())
        throw std::invalid_argument("weighted_norm_sector: derivative order above p_max");
    double th_lo, th_hi;
    sector_bounds(dec, vertex, th_lo, th_hi);
    WeightedNormResult out;
    if (!(th_hi > th_lo)) return out;  // empty neighborhood
    const Vec2 v = dec.polygon().vertex(vertex);
    const double xi = dec.xi();
    const double res = u.resolution();
    const double stop = std::max(opt.floor, res > 0.0 ? 0.5 * res : 0.0);
    const QuadratureRule th_rule = gauss_legendre(opt.quad, th_lo, th_hi);

    double worst_ratio = 0.0;
    double max_sq = 0.0;
    bool divergent = false;
    for (int b1 = 0; b1 <= p && !divergent; ++b1) {
        const int b2 = p - b1;
        auto panel = [&](double lo, double hi) {
            const QuadratureRule r_rule = gauss_legendre(opt.quad, lo, hi);
            double acc = 0.0;
            for (int ir = 0; ir < r_rule.size(); ++ir) {
                const double r = r_rule.nodes[ir];
                const double wr = r_rule.weights[ir] * std::pow(r, 2.0 * exp_v) * r;
                for (int it = 0; it < th_rule.size(); ++it) {
                    const double th = th_rule.nodes[it];
                    const Vec2 pt = v + Vec2{r * std::cos(th), r * std::sin(th)};
                    const double d = u.derivative(pt, b1, b2);
                    acc += wr * th_rule.weights[it] * d * d;
                }
            }
            return acc;
        };
        LadderSum ls = geometric_ladder(xi, stop, opt.divergence_ratio, opt.max_panels, panel);
        worst_ratio = std::max(worst_ratio, ls.ratio);
        if (ls.divergent) divergent = true;
        max_sq = std::max(max_sq, ls.value);
    }
    out.panel_ratio = worst_ratio;
    out.divergent = divergent;
    out.value = divergent ? kInf : std::sqrt(max_sq);
    return out;
}

WeightedNormResult weighted_norm_edge_region(const NeighborhoodDecomposition& dec, int edge,
                                             const PlaneField& u, int p_perp, int p_par,
                                             double exp_e, const LadderOptions& opt) {
    if (p_perp + p_par > u.max_order())
        throw std::invalid_argument("weighted_norm_edge_region: order above p_max");
    const Polygon& poly = dec.polygon();
    const Vec2 A = poly.edge_start(edge);
    const Vec2 t = poly.edge_tangent(edge);
    const Vec2 n = poly.edge_normal(edge);
    const double L = poly.edge_length(edge);
    const double xi = dec.xi();
    const double band = std::pow(xi, dec.edge_exponent());
    const double res = u.resolution();
    const double stop = std::max(opt.floor, res > 0.0 ? 0.5 * res : 0.0);

    auto panel = [&](double lo, double hi) {
        // strip w in (lo,hi); tangential extent excludes r_v < xi at both ends
        const QuadratureRule wr = gauss_legendre(opt.quad, lo, hi);
        double acc = 0.0;
        for (int iw = 0; iw < wr.size(); ++iw) {
            const double w = wr.nodes[iw];
            const double cut = std::sqrt(std::max(0.0, xi * xi - w * w));
            const double plo = cut, phi = L - cut;
            if (phi <= plo) continue;
            const QuadratureRule pr = gauss_legendre(2 * opt.quad, plo, phi);
            for (int ip = 0; ip < pr.size(); ++ip) {
                const Vec2 pt = A + t * pr.nodes[ip] + n * w;
                const double d = rotated_derivative(u, pt, t, n, p_perp, p_par);
                acc += wr.weights[iw] * pr.weights[ip] * std::pow(w, 2.0 * exp_e) * d * d;
            }
        }
        return acc;
    };
    WeightedNormResult out;
    LadderSum ls = geometric_ladder(band, stop, opt.divergence_ratio, opt.max_panels, panel);
    out.panel_ratio = ls.ratio;
    out.divergent = ls.divergent;
    out.value = ls.divergent ? kInf : std::sqrt(ls.value);
    return out;
}

WeightedNormResult weighted_norm_vertex_edge_region(const NeighborhoodDecomposition& dec,
                                                    int vertex, int edge, const PlaneField& u,
                                                    int p_perp, int p_par, double exp_e,
                                                    double exp_v, const LadderOptions& opt) {
    if (p_perp + p_par > u.max_order())
        throw std::invalid_argument("weighted_norm_vertex_edge_region: order above p_max");
    const Polygon& poly = dec.polygon();
    const Vec2 v = poly.vertex(vertex);
    const auto everts = poly.vertices_of_edge(edge);
    const Vec2 far = poly.vertex(everts[0] == vertex ? everts[1] : everts[0]);
    const Vec2 t = (far - v).normalized();
    Vec2 n = poly.edge_normal(edge);
    const double xi = dec.xi();
    const double th_max = std::asin(std::min(1.0, xi));
    const double res = u.resolution();
    const double stop = std::max(opt.floor, res > 0.0 ? 0.5 * res : 0.0);

    // double geometric ladder: radial panels times angular panels toward the edge
    auto angular_sum = [&](double r_lo, double r_hi, double t_lo, double t_hi) {
        const QuadratureRule rr = gauss_legendre(opt.quad, r_lo, r_hi);
        const QuadratureRule tr = gauss_legendre(opt.quad, t_lo, t_hi);
        double acc = 0.0;
        for (int ir = 0; ir < rr.size(); ++ir) {
            const double r = rr.nodes[ir];
            for (int it = 0; it < tr.size(); ++it) {
                const double th = tr.nodes[it];
                const Vec2 pt = v + t * (r * std::cos(th)) + n * (r * std::sin(th));
                const double re = r * std::sin(th);
                const double d = rotated_derivative(u, pt, t, n, p_perp, p_par);
                acc += rr.weights[ir] * tr.weights[it] * r * std::pow(re, 2.0 * exp_e) *
                       std::pow(r, 2.0 * exp_v) * d * d;
            }
        }
        return acc;
    };
    WeightedNormResult out;
    bool divergent = false;
    double worst_ratio = 0.0;

    auto radial_panel = [&](double r_lo, double r_hi) {
        // inner angular ladder toward theta = 0 at this radial band
        const double th_stop = std::max(stop / std::max(r_hi, 1e-300), 1e-15);
        LadderSum inner = geometric_ladder(
            th_max, th_stop, opt.divergence_ratio, opt.max_panels,
            [&](double t_lo, double t_hi) { return angular_sum(r_lo, r_hi, t_lo, t_hi); });
        if (inner.divergent) divergent = true;
        worst_ratio = std::max(worst_ratio, inner.ratio);
        return inner.divergent ? 0.0 : inner.value;
    };
    LadderSum ls = geometric_ladder(xi, std::max(stop, opt.floor), opt.divergence_ratio,
                                    opt.max_panels, radial_panel);
    out.panel_ratio = std::max(ls.ratio, worst_ratio);
    out.divergent = divergent || ls.divergent;
    out.value = out.divergent ? kInf : std::sqrt(ls.value);
    return out;
}

WeightedNormResult interior_norm(const NeighborhoodDecomposition& dec, const PlaneField& u, int p,
                                 int n_samples) {
    WeightedNormResult out;
    const std::vector<Vec2> pts = sample_polygon(dec.polygon(), n_samples, 11);
    const double area = dec.polygon().area();
    double max_sq = 0.0;
    for (int b1 = 0; b1 <= p; ++b1) {
        const int b2 = p - b1;
        double acc = 0.0;
        long used = 0;
        for (const Vec2& pt : pts) {
            if (dec.classify(pt).kind != RegionKind::kInterior) continue;
            const double d = u.derivative(pt, b1, b2);
            acc += d * d;
            ++used;
        }
        if (used > 0) acc *= area * static_cast<double>(used) / pts.size() / used;
        max_sq = std::max(max_sq, acc);
    }
    out.value = std::sqrt(max_sq);
    return out;
}

// ---------------------------------------------------------------------------
// Envelope fits
// ---------------------------------------------------------------------------

GammaFit fit_gamma(const std::vector<std::pair<int, double>>& rows) {
    GammaFit fit;
    std::vector<std::pair<double, double>> pts;  // (p+1, log n_p - p log p)
    for (const auto& [p, n] : rows) {
        if (!std::isfinite(n)) {
            fit.divergent_row = p;
            return fit;  // fit refused
        }
        if (n <= 0.0) continue;
        const double plogp = p == 0 ? 0.0 : p * std::log(static_cast<double>(p));
        pts.emplace_back(p + 1.0, std::log(n) - plogp);
    }
    if (pts.size() < 3) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(pts.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double inter = (sy - slope * sx) / m;
    double res = 0.0;
    double lift = -kInf;
    for (auto& [x, y] : pts) {
        const double e = y - (inter + slope * x);
        res += e * e;
        lift = std::max(lift, e);
    }
    fit.log_c = inter + lift;  // raise the envelope so every row is on or below
    fit.gamma = std::exp(slope);
    fit.residual = std::sqrt(res / m);
    fit.valid = true;
    return fit;
}

GammaFEstimate analytic_data_classifier_1d(const Field1D& f, double a, double b, int j_max) {
    GammaFEstimate out;
    for (int j = 0; j <= j_max; ++j) {
        const QuadratureRule r = gauss_legendre(24, a, b);
        double acc = 0.0;
        for (int i = 0; i < r.size(); ++i) {
            const double d = f.derivative(r.nodes[i], j);
            acc += r.weights[i] * d * d;
        }
        out.row_sums.push_back(std::sqrt(acc));
    }
    double gamma = 0.0;
    for (int j = 0; j <= j_max; ++j) {
        const double jj = j == 0 ? 1.0 : std::pow(static_cast<double>(j), j);
        const double need = std::pow(out.row_sums[j] / jj, 1.0 / (j + 1.0));
        gamma = std::max(gamma, need);
    }
    out.gamma_f = gamma;
    double resid = -kInf;
    for (int j = 0; j <= j_max; ++j) {
        const double jj = j == 0 ? 1.0 : std::pow(static_cast<double>(j), j);
        resid = std::max(resid, out.row_sums[j] - std::pow(gamma, j + 1.0) * jj);
    }
    out.envelope_residual = resid;
    return out;
}

// ---------------------------------------------------------------------------
// Hardy / localization / Caccioppoli / tubular
// ---------------------------------------------------------------------------

HardyResult hardy_check_1d(const Field1D& u, double L, double eps, double s,
                           const LadderOptions& opt) {
    HardyResult out;
    const WeightedNormResult lhs = weighted_norm_interval(u, L, 0, -0.5 - s + eps, opt);
    if (lhs.divergent) {
        out.precondition_ok = false;
        out.lhs = kInf;
        return out;
    }
    const WeightedNormResult rhs = weighted_norm_interval(u, L, 1, 0.5 - s + eps, opt);
    out.lhs = lhs.value;
    out.rhs = rhs.value;
    out.ratio = rhs.value > 0.0 ? lhs.value / rhs.value : 0.0;
    return out;
}

LocalizationResult localization_check(const Field1D& f, double center, double R,
                                      const FractionalParams& params,
                                      const FractionalForm& omega_form) {
    const Mesh1D& om = omega_form.space().mesh;
    if (center - R < om.a() - 1e-12 || center + R > om.b() + 1e-12)
        throw std::invalid_argument("localization_check: cutoff ball not inside the interval");
    auto eta = [center, R](double x) {
        const double t = (x - center) / R;
        const double g = 1.0 - t * t;
        return g > 0.0 ? g * g * g : 0.0;
    };
    auto deta = [center, R](double x) {
        const double t = (x - center) / R;
        const double g = 1.0 - t * t;
        return g > 0.0 ? -6.0 * t * g * g / R : 0.0;
    };
    const double s = params.s;
    LocalizationResult out;

    // (A.1): dual norm of eta f vs ||eta||_inf ||f||_{L2(B_R)}
    const Eigen::VectorXd b = load_vector(omega_form.space(),
                                          [&](double x) { return eta(x) * f.value(x); });
    out.lhs_dual = omega_form.dual_norm(omega_form.restrict_interior(b));
    double l2_ball = 0.0;
    {
        const QuadratureRule r = gauss_legendre(32, center - R, center + R);
        for (int i = 0; i < r.size(); ++i)
            l2_ball += r.weights[i] * f.value(r.nodes[i]) * f.value(r.nodes[i]);
    }
    out.rhs_dual = std::sqrt(l2_ball);  // ||eta||_inf = 1
    out.ratio_dual = out.rhs_dual > 0.0 ? out.lhs_dual / out.rhs_dual : 0.0;

    // (A.2): H^{1-s} norm of eta f vs the gradient-weighted bracket
    auto etaf = [&](double x) { return eta(x) * f.value(x); };
    double l2_etaf = 0.0, l2_f = 0.0;
    for (int e = 0; e < om.n_elements(); ++e) {
        const QuadratureRule r = gauss_legendre(10, om.nodes[e], om.nodes[e + 1]);
        for (int i = 0; i < r.size(); ++i) {
            l2_etaf += r.weights[i] * etaf(r.nodes[i]) * etaf(r.nodes[i]);
            l2_f += r.weights[i] * f.value(r.nodes[i]) * f.value(r.nodes[i]);
        }
    }
    const double t_ord = 1.0 - s;
    const double semi_etaf = slobodeckij_seminorm_sq(etaf, om, t_ord, 12, 7);
    const double semi_f =
        slobodeckij_seminorm_sq([&](double x) { return f.value(x); }, om, t_ord, 12, 7);
    out.lhs_h1ms = std::sqrt(l2_etaf + semi_etaf);
    double grad_eta_inf = 0.0;
    for (int i = 0; i <= 200; ++i)
        grad_eta_inf = std::max(grad_eta_inf, std::abs(deta(center - R + 2.0 * R * i / 200)));
    out.rhs_h1ms = (std::pow(R, s) * grad_eta_inf + (std::pow(R, s - 1.0) + 1.0)) *
                       std::sqrt(l2_f) +
                   std::sqrt(semi_f);
    out.ratio_h1ms = out.rhs_h1ms > 0.0 ? out.lhs_h1ms / out.rhs_h1ms : 0.0;
    return out;
}

namespace {

// int over (x0-r, x0+r) x (0, y_max) of y^alpha q(x,y)
template <class Q>
double strip_integral(double x0, double r, double y_max, double alpha, int quad, Q&& q) {
    // geometric y panels toward 0 with Gauss-Jacobi absorbing the weight there
    double acc = 0.0;
    double hi = y_max;
    const double floor = 1e-10 * y_max;
    const QuadratureRule rx = gauss_legendre(quad, x0 - r, x0 + r);
    bool first = true;
    while (hi > floor) {
        const double lo = hi * 0.5 > floor ? hi * 0.5 : 0.0;
        QuadratureRule ry;
        if (lo == 0.0) {
            ry = gauss_jacobi(alpha, quad, 0.0, hi);
            first = false;
        } else {
            ry = gauss_legendre(quad, lo, hi);
        }
        for (int j = 0; j < ry.size(); ++j) {
            const double w = lo == 0.0 ? ry.weights[j]
                                       : ry.weights[j] * std::pow(ry.nodes[j], alpha);
            for (int i = 0; i < rx.size(); ++i)
                acc += rx.weights[i] * w * q(rx.nodes[i], ry.nodes[j]);
        }
        if (lo == 0.0) break;
        hi = lo;
    }
    (void)first;
    return acc;
}

}  // namespace

CaccioppoliResult caccioppoli_interior_check(const SlabField& U, const FractionalParams& params,
                                             double x0, double R, double c, int p,
                                             const Field1D* f, const SlabField* F,
                                             const FractionalForm& omega_form, double y_max) {
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("caccioppoli_interior_check: c in (0,1) required");
    if (p + 1 > U.max_order())
        throw std::invalid_argument("caccioppoli_interior_check: order above p_max");
    const Mesh1D& om = omega_form.space().mesh;
    if (x0 - R < om.a() || x0 + R > om.b())
        throw std::invalid_argument("caccioppoli_interior_check: ball not interior");
    const double alpha = params.alpha;
    CaccioppoliResult out;

    out.lhs = strip_integral(x0, c * R, y_max, alpha, 10, [&](double x, double y) {
        const double a1 = U.derivative(x, y, p + 1, 0);
        const double a2 = U.derivative(x, y, p, 1);
        return a1 * a1 + a2 * a2;
    });
    const double grad_outer = strip_integral(x0, R, y_max, alpha, 10, [&](double x, double y) {
        const double a1 = U.derivative(x, y, 1, 0);
        const double a2 = U.derivative(x, y, 0, 1);
        return a1 * a1 + a2 * a2;
    });

    double data_term = 0.0;
    if (p == 1) {
        // dual-norm surrogate of zeta d_x f with the C^2 plateau cutoff
        if (f != nullptr) {
            auto zeta = [&](double x) {
                const double d = std::abs(x - x0);
                if (d <= c * R) return 1.0;
                if (d >= R) return 0.0;
                const double t = (R - d) / ((1.0 - c) * R);
                return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
            };
            const Eigen::VectorXd b = load_vector(
                omega_form.space(), [&](double x) { return zeta(x) * f->derivative(x, 1); });
            const double dn = omega_form.dual_norm(omega_form.restrict_interior(b));
            data_term += dn * dn;
        }
        if (F != nullptr) {
            data_term += strip_integral(x0, R, y_max, -alpha, 10, [&](double x, double y) {
                const double v = F->value(x, y);
                return v * v;
            });
        }
        out.rhs_bracket = std::pow((1.0 - c) * R, -2.0) * grad_outer + data_term;
    } else {
        // high-order bracket with unit gamma: p^{2p} R^{-2p} |grad U|^2 +
        // sum_j p^{2(p-j)} R^{2(j-p)} (|f^(j)|^2_{L2(B_R)} + |F^(j-1)|^2)
        double bracket = std::pow(static_cast<double>(p), 2.0 * p) * std::pow(R, -2.0 * p) *
                         grad_outer;
        for (int j = 1; j <= p; ++j) {
            double fj = 0.0;
            if (f != nullptr) {
                const QuadratureRule r = gauss_legendre(16, x0 - R, x0 + R);
                for (int i = 0; i < r.size(); ++i) {
                    const double d = f->derivative(r.nodes[i], j);
                    fj += r.weights[i] * d * d;
                }
            }
            double Fj = 0.0;
            if (F != nullptr) {
                Fj = strip_integral(x0, R, y_max, -alpha, 8, [&](double x, double y) {
                    const double v = F->derivative(x, y, j - 1, 0);
                    return v * v;
                });
            }
            bracket += std::pow(static_cast<double>(p), 2.0 * (p - j)) *
                       std::pow(R, 2.0 * (j - p)) * (fj + Fj);
        }
        out.rhs_bracket = bracket;
    }
    out.ratio = out.rhs_bracket > 0.0 ? out.lhs / out.rhs_bracket : 0.0;
    return out;
}

CaccioppoliResult caccioppoli_boundary_check(const ExtensionField2D& U, int edge, Vec2 x0,
                                             double R, double c,
                                             const std::function<double(Vec2)>& f_dpar,
                                             double y_cut) {
    const Polygon& poly = U.domain;
    const Vec2 t = poly.edge_tangent(edge);
    const Vec2 n = poly.edge_normal(edge);
    const double alpha = U.params.alpha;
    CaccioppoliResult out;

    // integral over the half-disk of radius r (inward side) times (0, y_cut)
    auto half_disk_integral = [&](double r, auto&& q) {
        const QuadratureRule rr = gauss_legendre(10, 0.0, r);
        const QuadratureRule tr = gauss_legendre(10, 0.0, M_PI);
        double acc = 0.0;
        double hi = y_cut;
        const double floor = 1e-8 * y_cut;
        while (hi > floor) {
            const double lo = hi * 0.5 > floor ? hi * 0.5 : 0.0;
            QuadratureRule ry = lo == 0.0 ? gauss_jacobi(alpha, 8, 0.0, hi)
                                          : gauss_legendre(8, lo, hi);
            for (int j = 0; j < ry.size(); ++j) {
                const double wy =
                    lo == 0.0 ? ry.weights[j] : ry.weights[j] * std::pow(ry.nodes[j], alpha);
                for (int ir = 0; ir < rr.size(); ++ir)
                    for (int it = 0; it < tr.size(); ++it) {
                        const double rad = rr.nodes[ir];
                        const double th = tr.nodes[it];
                        const Vec2 p = x0 + t * (rad * std::cos(th)) + n * (rad * std::sin(th));
                        acc += rr.weights[ir] * tr.weights[it] * wy * rad *
                               q(p, ry.nodes[j]);
                    }
            }
            if (lo == 0.0) break;
            hi = lo;
        }
        return acc;
    };

    out.lhs = half_disk_integral(c * R, [&](Vec2 p, double y) {
        // D_par grad U: tangential derivative of each gradient component
        const double g1 = t.x * U.eval(p, y, 2, 0, 0) + t.y * U.eval(p, y, 1, 1, 0);
        const double g2 = t.x * U.eval(p, y, 1, 1, 0) + t.y * U.eval(p, y, 0, 2, 0);
        const double gy = t.x * U.eval(p, y, 1, 0, 1) + t.y * U.eval(p, y, 0, 1, 1);
        return g1 * g1 + g2 * g2 + gy * gy;
    });
    const double grad_outer = half_disk_integral(R, [&](Vec2 p, double y) {
        const double g1 = U.eval(p, y, 1, 0, 0);
        const double g2 = U.eval(p, y, 0, 1, 0);
        const double gy = U.eval(p, y, 0, 0, 1);
        return g1 * g1 + g2 * g2 + gy * gy;
    });
    // localized data surrogate: ||D_par f||^2_{L2(B_R cap Omega)}
    double fdata = 0.0;
    {
        const QuadratureRule rr = gauss_legendre(12, 0.0, R);
        const QuadratureRule tr = gauss_legendre(12, 0.0, M_PI);
        for (int ir = 0; ir < rr.size(); ++ir)
            for (int it = 0; it < tr.size(); ++it) {
                const Vec2 p = x0 + t * (rr.nodes[ir] * std::cos(tr.nodes[it])) +
                               n * (rr.nodes[ir] * std::sin(tr.nodes[it]));
                if (!poly.contains(p)) continue;
                const double d = f_dpar(p);
                fdata += rr.weights[ir] * tr.weights[it] * rr.nodes[ir] * d * d;
            }
    }
    out.rhs_bracket = std::pow((1.0 - c) * R, -2.0) * grad_outer + fdata;
    out.ratio = out.rhs_bracket > 0.0 ? out.lhs / out.rhs_bracket : 0.0;
    return out;
}

TubularResult tubular_bound_check(const ExtensionField1D& U, double R, double t,
                                  const LadderOptions& opt) {
    TubularResult out;
    const double a = U.omega_a, b = U.omega_b;
    const double half = 0.5 * (b - a);
    if (!(R > 0.0 && R <= half))
        throw std::invalid_argument("tubular_bound_check: R must lie in (0, |Omega|/2]");

    // shared geometric panels toward both endpoints; lhs and mid accumulate
    // over identical quadrature nodes so the pointwise inequality survives
    // discretization exactly
    double lhs = 0.0, mid = 0.0;
    double last_panel = -1.0, ratio = 0.0;
    double hi = half;
    int k = 0;
    while (hi > std::max(opt.floor, 1e-14) && k < opt.max_panels) {
        const double lo = 0.5 * hi;
        double panel_mid = 0.0, panel_lhs = 0.0;
        for (int side = 0; side < 2; ++side) {
            const double x_lo = side == 0 ? a + lo : b - hi;
            const double x_hi = side == 0 ? a + hi : b - lo;
            const QuadratureRule rx = gauss_legendre(opt.quad, x_lo, x_hi);
            for (int i = 0; i < rx.size(); ++i) {
                const double x = rx.nodes[i];
                const double dist = std::min(x - a, b - x);
                // y-integral of y^alpha |grad U|^2 at this x
                double gy = 0.0;
                double yhi = U.Y;
                while (yhi > 1e-10 * U.Y) {
                    const double ylo = yhi * 0.5 > 1e-10 * U.Y ? yhi * 0.5 : 0.0;
                    QuadratureRule ry = ylo == 0.0
                                            ? gauss_jacobi(U.params.alpha, 6, 0.0, yhi)
                                            : gauss_legendre(6, ylo, yhi);
                    for (int j = 0; j < ry.size(); ++j) {
                        const double wy = ylo == 0.0 ? ry.weights[j]
                                                     : ry.weights[j] *
                                                           std::pow(ry.nodes[j], U.params.alpha);
                        const double ux = U.eval(x, ry.nodes[j], 1, 0);
                        const double uy = U.eval(x, ry.nodes[j], 0, 1);
                        gy += wy * (ux * ux + uy * uy);
                    }
                    if (ylo == 0.0) break;
                    yhi = ylo;
                }
                panel_mid += rx.weights[i] * std::pow(dist, -2.0 * t) * gy;
                if (dist < R) panel_lhs += rx.weights[i] * std::pow(R, -2.0 * t) * gy;
            }
        }
        mid += panel_mid;
        lhs += panel_lhs;
        if (last_panel > 0.0) ratio = panel_mid / last_panel;
        last_panel = panel_mid;
        hi = lo;
        ++k;
        if (ratio > 0.0 && ratio < 0.9 && panel_mid < 1e-16 * std::max(mid, 1e-300)) break;
    }
    out.lhs = lhs;
    out.mid = mid;
    out.mid_divergent = ratio >= opt.divergence_ratio;
    if (out.mid_divergent) out.mid = kInf;
    out.ratio = out.mid > 0.0 && !out.mid_divergent ? lhs / mid : 0.0;
    return out;
}

}  // namespace fraclap
