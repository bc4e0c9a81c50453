#pragma once

#include <optional>
#include <vector>

#include "fraclap/geometry.hpp"

namespace fraclap {

enum class CoverItemKind { kBall, kHalfBall };

struct CoverItem {
    Vec2 center;
    double anchor_dist;  // distance to the vertex (vertex/outer coverings) or edge (row lattices)
    int level;           // dyadic shell / lattice row
    CoverItemKind kind = CoverItemKind::kBall;
};

struct DeltaTail {
    double delta = 0.0;
    std::vector<double> partial_sums;   // cumulative per level
    double increment_ratio = 0.0;       // measured geometric ratio of per-level increments
    double tail_below_radius = 0.0;     // contribution of items with R_i < tail_radius
    double tail_radius = 1e-12;
    double extrapolated_remainder = 0;  // geometric extrapolation past the enumeration
    bool cauchy = false;                // increments decay geometrically
};

struct CoverageCertificate {
    double coverage_fraction = 0.0;
    long coverage_samples = 0;
    int overlap_max = 0;
    int overlap_max_doubled = 0;  // recomputed with twice the samples
    long overlap_samples = 0;
    double c_b = 0.0;  // measured two-sided anchor-distance constant over stretched items
};

struct BallCovering {
    RegionTag region;
    double c = 0.0;
    double c_tilde = 0.0;
    double c_hat = 0.0;
    std::vector<CoverItem> items;
    CoverageCertificate cert;
    std::vector<DeltaTail> delta_tails;

    double cover_radius(const CoverItem& it) const { return c * it.anchor_dist; }
    double tilde_radius(const CoverItem& it) const { return c_tilde * it.anchor_dist; }
    double stretched_radius(const CoverItem& it) const { return c_hat * it.anchor_dist; }
    bool empty() const { return items.empty(); }
};

struct CoverParams {
    double c = 0.25;
    double c_hat = 0.0;    // 0 -> auto from the measured feasibility bound
    double c_tilde = 0.0;  // 0 -> midpoint of (c, c_hat)
    double floor_radius = 1e-12;
    std::vector<double> delta_probes{0.5, 1.0};
    int mc_samples = 100000;
    unsigned seed = 1;
    long max_items = 2000000;
};

// Greedy farthest-point covering of a vertex neighborhood by balls with radius
// proportional to the distance to the vertex, certified by quasi-Monte-Carlo
// sampling.
BallCovering cover_vertex(const NeighborhoodDecomposition& dec, int vertex,
                          const CoverParams& params = {});

// Row-lattice covering of an edge neighborhood by balls with radius
// proportional to the distance to the edge. Membership queries are closed-form
// so certification does not require enumerating the deep rows.
BallCovering cover_edge(const NeighborhoodDecomposition& dec, int edge,
                        const CoverParams& params = {});

struct SubCoverParams {
    double c1 = 0.0;      // 0 -> auto from the containment constraint
    double c1_hat = 0.0;  // 0 -> auto
    double floor_radius = 1e-12;
    std::vector<double> delta_probes{0.5, 1.0};
    int mc_samples = 10000;
    unsigned seed = 1;
    long max_items = 200000;
};

// Covering of a vertex-edge neighborhood: half-balls centered on the edge with
// radius proportional to the distance to the vertex (geometrically decaying
// chain), plus per-half-ball interior ball lattices refined toward the edge
// whose stretched balls stay inside the intermediate half-ball.
class VertexEdgeCovering {
public:
    VertexEdgeCovering(const NeighborhoodDecomposition& dec, int vertex, int edge,
                       const CoverParams& params = {});

    const BallCovering& outer() const { return outer_; }
    int n_half_balls() const { return static_cast<int>(outer_.items.size()); }

    // Lemma-5.4-style sub-covering of half-ball i; certifies coverage of H_i,
    // the containment of stretched balls in the intermediate half-ball, and
    // the overlap constant.
    BallCovering subcovering(int i, const SubCoverParams& params = {}) const;

    // Largest feasible stretched factor of the interior balls, (c_tilde-c)/c.
    double feasible_c1_hat() const;

    Vec2 edge_tangent() const { return tangent_; }
    Vec2 edge_normal() const { return normal_; }

private:
    const Polygon poly_;
    int vertex_;
    int edge_;
    CoverParams params_;
    BallCovering outer_;
    Vec2 vertex_pos_;
    Vec2 tangent_;
    Vec2 normal_;
};

}  // namespace fraclap
