#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fraclap/assembly1d.hpp"
#include "fraclap/extension.hpp"
#include "fraclap/fields.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

// ---------------------------------------------------------------------------
// Weighted derivative norms with divergence detection on geometric panel
// ladders toward the singular set.
// ---------------------------------------------------------------------------

struct LadderOptions {
    double floor = 1e-12;           // deepest panel boundary (absolute)
    int quad = 12;                  // Gauss points per panel and direction
    double divergence_ratio = 0.98; // non-decaying panel sums flag divergence
    int max_panels = 2000;
};

struct WeightedNormResult {
    double value = 0.0;     // +inf when divergent
    bool divergent = false;
    double panel_ratio = 0.0;  // measured geometric decay of panel sums
};

// || x^exp_v  d^p u ||_{L2(0,L)}; the 1D analog of a vertex-weighted norm with
// the vertex at 0. Discrete fields are integrated exactly below their
// resolution (the admissible basis vanishes at 0, so the p = 0 row carries a
// factored quadratic vanishing).
WeightedNormResult weighted_norm_interval(const Field1D& u, double L, int p, double exp_v,
                                          const LadderOptions& opt = {});

// Theorem-style vertex row in the 1D analog: exponent p - 1/2 - s + eps.
WeightedNormResult weighted_norm_vertex_1d(const Field1D& u, double L, int p, double eps, double s,
                                           const LadderOptions& opt = {});

// Scalar function on the plane with global-frame mixed derivatives.
class PlaneField {
public:
    virtual ~PlaneField() = default;
    virtual double derivative(Vec2 p, int d1, int d2) const = 0;
    virtual int max_order() const = 0;
    virtual double resolution() const { return 0.0; }
    double value(Vec2 p) const { return derivative(p, 0, 0); }
};

// r^kappa sin(kappa (theta - theta0)) around a vertex: the harmonic-cone
// profile with exact derivatives through complex powers.
std::shared_ptr<PlaneField> corner_power_field(Vec2 vertex, double theta0, double kappa);
// product field u(x1,x2) = g(x1)h(x2) from 1D closed forms
std::shared_ptr<PlaneField> product_field(std::shared_ptr<Field1D> g, std::shared_ptr<Field1D> h);
// trace of a d=2 extension as a plane field (element-wise derivatives)
std::shared_ptr<PlaneField> trace_plane_field(std::shared_ptr<const ExtensionField2D> U);

// (t.grad)^{p_par} (n.grad)^{p_perp} u via the multinomial expansion.
double rotated_derivative(const PlaneField& u, Vec2 p, Vec2 tangent, Vec2 normal, int p_perp,
                          int p_par);

// max over |beta| = p of || r_v^exp_v  d^beta u ||_{L2(omega_v)}
WeightedNormResult weighted_norm_sector(const NeighborhoodDecomposition& dec, int vertex,
                                        const PlaneField& u, int p, double exp_v,
                                        const LadderOptions& opt = {});

// || r_e^exp_e  D_perp^{p_perp} D_par^{p_par} u ||_{L2(omega_e)}
WeightedNormResult weighted_norm_edge_region(const NeighborhoodDecomposition& dec, int edge,
                                             const PlaneField& u, int p_perp, int p_par,
                                             double exp_e, const LadderOptions& opt = {});

// || r_e^exp_e r_v^exp_v D_perp^{p_perp} D_par^{p_par} u ||_{L2(omega_ve)}
WeightedNormResult weighted_norm_vertex_edge_region(const NeighborhoodDecomposition& dec,
                                                    int vertex, int edge, const PlaneField& u,
                                                    int p_perp, int p_par, double exp_e,
                                                    double exp_v, const LadderOptions& opt = {});

// max over |beta| = p of the plain L2 norm over the sampled interior part
WeightedNormResult interior_norm(const NeighborhoodDecomposition& dec, const PlaneField& u, int p,
                                 int n_samples = 20000);

// ---------------------------------------------------------------------------
// Analytic-growth envelope fits
// ---------------------------------------------------------------------------

struct GammaFit {
    double log_c = 0.0;
    double gamma = 0.0;
    double residual = 0.0;  // least-squares residual of the slope fit
    bool valid = false;
    int divergent_row = -1;  // p of the first infinite row, if any
};

// Envelope fit of norm_p <= C gamma^{p+1} p^p by least squares on
// log(norm) - p log p against (p+1), then lifting C so no row lies above.
GammaFit fit_gamma(const std::vector<std::pair<int, double>>& rows);

struct GammaFEstimate {
    double gamma_f = 0.0;
    std::vector<double> row_sums;      // ||f^(j)||_{L2} per j
    double envelope_residual = 0.0;    // max_j (a_j - gamma^{j+1} j^j), <= 0
};

// Smallest gamma_f with ||f^(j)|| <= gamma_f^{j+1} j^j for all j <= j_max.
GammaFEstimate analytic_data_classifier_1d(const Field1D& f, double a, double b, int j_max);

// ---------------------------------------------------------------------------
// Inequality verifiers
// ---------------------------------------------------------------------------

struct HardyResult {
    double lhs = 0.0;  // || x^{-1/2-s+eps} u ||
    double rhs = 0.0;  // || x^{1/2-s+eps} u' ||
    double ratio = 0.0;
    bool precondition_ok = true;  // u -> 0 at the vertex (lhs ladder decays)
};
HardyResult hardy_check_1d(const Field1D& u, double L, double eps, double s,
                           const LadderOptions& opt = {});

struct LocalizationResult {
    double lhs_dual = 0.0;   // ||eta f||_{H^-s}
    double rhs_dual = 0.0;   // ||eta||_inf ||f||_{L2(B_R)}
    double ratio_dual = 0.0;
    double lhs_h1ms = 0.0;   // ||eta f||_{H^{1-s}}
    double rhs_h1ms = 0.0;   // bracket of the gradient-weighted bound
    double ratio_h1ms = 0.0;
};
// eta is the fixed C^2 bump (1 - ((x-center)/R)^2)^3 supported in B_R(center),
// which must sit inside the form's interval.
LocalizationResult localization_check(const Field1D& f, double center, double R,
                                      const FractionalParams& params,
                                      const FractionalForm& omega_form);

struct CaccioppoliResult {
    double lhs = 0.0;
    double rhs_bracket = 0.0;
    double ratio = 0.0;
};

// Interior Caccioppoli check on a d=1 slab strip: derivatives of order p+1 on
// the inner strip vs the first-order energy on the outer strip plus data.
// p = 1 uses the dual-norm surrogate of zeta d_x f; higher p uses the L2 data
// maxima of the high-order bracket (unit gamma).
CaccioppoliResult caccioppoli_interior_check(const SlabField& U, const FractionalParams& params,
                                             double x0, double R, double c, int p,
                                             const Field1D* f, const SlabField* F,
                                             const FractionalForm& omega_form, double y_max);

// Boundary Caccioppoli on the d=2 extension: tangential derivative along the
// edge, half-disk strips, data bracket via the localized L2 surrogate.
CaccioppoliResult caccioppoli_boundary_check(const ExtensionField2D& U, int edge, Vec2 x0,
                                             double R, double c,
                                             const std::function<double(Vec2)>& f_dpar,
                                             double y_cut);

struct TubularResult {
    double lhs = 0.0;  // R^{-2t} |grad U|^2 on the tubular strip
    double mid = 0.0;  // | r^{-t} grad U |^2 over Omega
    double ratio = 0.0;
    bool mid_divergent = false;
};
TubularResult tubular_bound_check(const ExtensionField1D& U, double R, double t,
                                  const LadderOptions& opt = {});

// ---------------------------------------------------------------------------
// Report container
// ---------------------------------------------------------------------------

struct ReportRow {
    std::string region;
    int p = 0;
    int p_perp = 0;
    int p_par = 0;
    double eps = 0.0;
    double value = 0.0;
    bool divergent = false;
};

struct RegularityReport {
    std::vector<ReportRow> rows;
    GammaFit fit;
    double gamma_f = 0.0;
    std::vector<std::pair<std::string, double>> inequality_checks;
};

}  // namespace fraclap
