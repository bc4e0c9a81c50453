#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <optional>

#include "fraclap/assembly1d.hpp"
#include "fraclap/fields.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/mesh1d.hpp"
#include "fraclap/solver1d.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

struct ExtensionOptions {
    int n_omega = 64;              // trace elements on Omega (per direction for d = 2)
    int degree_x = 1;
    double grading = 2.0;          // grading of the Omega trace cells toward the endpoints
    double box_pad = 1.0;          // box = Omega padded by pad * diam(Omega) per side
    double exterior_growth = 1.4;  // exterior trace cells grow geometrically
    double Y = 0.0;                // truncation height; 0 -> 4 * diam(Omega)
    double y_first_fraction = 1e-3;
    double y_ratio = 2.0;
    double H = 0.0;  // support height of F; 0 -> Y/2 when F is present
    int quad_y = 8;
    int n_threads = 1;
};

// Tensor-product Galerkin minimizer of
//   1/2 int y^a |grad U|^2 - int F U - int f tr U
// over the box x (0,Y), with tr U = 0 outside Omega and U(.,Y) = 0.
class ExtensionField1D {
public:
    std::shared_ptr<const FemSpace1D> xspace;  // on the bounding box
    Mesh1D ymesh;
    FractionalParams params{0.5, 0.0, 1, 0.0, 1.0};
    double omega_a = 0.0, omega_b = 0.0;
    double Y = 0.0, H = 0.0;
    // coefficients: (x nodes) x (y nodes); the y = Y column is pinned to zero
    Eigen::MatrixXd coeffs;
    double energy = 0.0;
    double residual = 0.0;

    int nx() const { return xspace->n_nodes(); }
    int ny() const { return static_cast<int>(ymesh.nodes.size()); }
    double eval(double x, double y, int dx = 0, int dy = 0) const;
    std::shared_ptr<Field1D> trace_field() const;
    std::shared_ptr<Field1D> y_slice(double y, int dy = 0) const;

    // weighted norms over box x (0,cut): int y^alpha q(x,y)
    double weighted_l2_sq(double cut) const;              // |U|^2_{L2_alpha}
    double weighted_grad_sq(double cut) const;            // |grad U|^2_{L2_alpha}
    double weighted_grad_sq_strip(double x_lo, double x_hi, double y_cut) const;
};

// Solve with Neumann-type data f on Omega and bulk data F (either may be null).
ExtensionField1D solve_extension_1d(const Field1D* f, const SlabField* F,
                                    const FractionalParams& params, double omega_a,
                                    double omega_b, const ExtensionOptions& opt = {});

// Minimize the energy with the trace prescribed on the whole box (Dirichlet
// trace data); used by the harmonic-extension oracles.
ExtensionField1D extend_dirichlet_trace_1d(const Field1D& g, const FractionalParams& params,
                                           double box_a, double box_b,
                                           const ExtensionOptions& opt = {});

// Interpolate a closed-form slab field onto the tensor grid of a solved field
// layout (admissible iff the function vanishes on the exterior trace).
ExtensionField1D interpolate_slab_field(const SlabField& g, const FractionalParams& params,
                                        double omega_a, double omega_b,
                                        const ExtensionOptions& opt = {});

// Random admissible field: interpolant of a seeded random low-mode series
// multiplied by a bump vanishing outside Omega.
ExtensionField1D random_admissible_field(unsigned seed, const FractionalParams& params,
                                         double omega_a, double omega_b,
                                         const ExtensionOptions& opt = {});

// -d_s y^alpha dU/dy at y -> 0, Richardson-extrapolated over the two smallest
// y levels; returned as a field on the Omega part of the trace mesh.
DiscreteSolution dtn_trace(const ExtensionField1D& U);

// ||U||_{L2_alpha(box x (0,H_cut))} / ||grad U||_{L2_alpha}; throws on a
// zero-energy field.
double poincare_ratio(const ExtensionField1D& U, double H_cut);

struct TraceCheckResult {
    double seminorm_hs;  // |tr U|_{H^s(R)}
    double grad_norm;    // ||grad U||_{L2_alpha}
    double ratio;
};
TraceCheckResult trace_inequality_check(const ExtensionField1D& U);

struct MultiplicativeTraceResult {
    double max_ratio = 0.0;
    double cut = 0.0;
};
// per-trace-node profile check of |V(0)|^2 <= C(||V||^{1-a}||V'||^{1+a} + ||V||^2),
// norms weighted L2_alpha over (0, cut); returns the worst ratio.
MultiplicativeTraceResult multiplicative_trace_check(const ExtensionField1D& U, double cut = 0.0);

// Same ratio for a single explicit profile; used by the closed-form oracles.
double multiplicative_trace_ratio_profile(const std::function<double(double)>& v,
                                          const std::function<double(double)>& dv, double alpha,
                                          double cut, int quad_points = 64);

struct ShiftProbeResult {
    double t = 0.0;
    double lhs = 0.0;     // int y^alpha |grad U(.,y)|^2_{H^t(box)} dy
    double rhs_nsq = 0.0; // N^2(U,F,f)
    double ratio = 0.0;   // observed C_t
};
// Requires t in [0,1/2); the H^{-s}/H^{1-s} data norms are evaluated through
// the supplied trace-space form.
ShiftProbeResult shift_theorem_probe(const ExtensionField1D& U, const Field1D* f,
                                     const SlabField* F, double t,
                                     const FractionalForm& omega_form);

struct NCheckReport {
    double grad_energy = 0.0;    // ||grad U||^2
    double f_dual_norm = 0.0;    // ||f||_{H^-s} surrogate
    double f_h1ms_norm = 0.0;    // ||f||_{H^{1-s}(Omega)}
    double big_f_norm = 0.0;     // ||F||_{L2_{-alpha}}
    double n_sq = 0.0;           // N^2(U,F,f)
    double apriori_ratio = 0.0;  // ||grad U|| / (||F|| + ||f||_{H^-s})
};
NCheckReport ncheck(const ExtensionField1D& U, const Field1D* f, const SlabField* F,
                    const FractionalForm& omega_form);

// --------------------------------------------------------------------------
// Coarse d = 2 demonstrator on a quadrilateral bounding-box grid.
// --------------------------------------------------------------------------

class ExtensionField2D {
public:
    std::shared_ptr<const FemSpace1D> xspace1;  // box axis 1
    std::shared_ptr<const FemSpace1D> xspace2;  // box axis 2
    Mesh1D ymesh;
    FractionalParams params{0.5, 0.0, 2, 0.0, 1.0};
    Polygon domain = Polygon::unit_square();
    double Y = 0.0, H = 0.0;
    // coefficients indexed by (ix1, ix2, iy) flattened as (ix1*n2 + ix2)*nyn + iy
    Eigen::VectorXd coeffs;
    double energy = 0.0;
    double residual = 0.0;

    int n1() const { return xspace1->n_nodes(); }
    int n2() const { return xspace2->n_nodes(); }
    int nyn() const { return static_cast<int>(ymesh.nodes.size()); }
    long index(int i1, int i2, int iy) const {
        return (static_cast<long>(i1) * n2() + i2) * nyn() + iy;
    }
    double eval(Vec2 x, double y, int d1 = 0, int d2 = 0, int dy = 0) const;
    // |grad U|^2_{L2_alpha} over (B_r(x0) cap Omega-halfplane) x (0, y_cut),
    // with derivatives rotated into (tangential, normal) components.
    double weighted_grad_sq(double y_cut) const;
};

struct Extension2DOptions {
    int n_cells = 12;     // per direction on the box
    int degree = 2;
    double box_pad = 0.5; // padding around the polygon, relative to diam
    double Y = 0.0;
    double y_first_fraction = 2e-3;
    double y_ratio = 2.0;
    int quad = 3;  // Gauss points per direction and cell for data integrals
};

ExtensionField2D solve_extension_2d(const Polygon& domain,
                                    const std::function<double(Vec2)>& f,
                                    const FractionalParams& params,
                                    const Extension2DOptions& opt = {});

}  // namespace fraclap
