#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace fraclap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
    Vec2 rot90() const { return {-y, x}; }
};

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// Simple closed polygon with straight edges; vertices are normalized to
// counterclockwise order on construction. Edge k joins vertex k and k+1 mod n.
class Polygon {
public:
    static Polygon from_vertices(std::vector<Vec2> vertices);
    static Polygon from_json(const std::string& json_text);
    static Polygon from_json_file(const std::string& path);
    std::string to_json() const;

    static Polygon unit_square();
    // (0,1)^2 minus [1/2,1)^2; reentrant corner at (1/2,1/2)
    static Polygon l_shape();
    // right triangle with the right angle at the origin, legs of given length
    static Polygon sector_triangle(double leg = 2.0);

    int n() const { return static_cast<int>(vertices_.size()); }
    Vec2 vertex(int i) const { return vertices_[i]; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    Vec2 edge_start(int k) const { return vertices_[k]; }
    Vec2 edge_end(int k) const { return vertices_[(k + 1) % n()]; }
    double edge_length(int k) const { return (edge_end(k) - edge_start(k)).norm(); }
    Vec2 edge_tangent(int k) const { return (edge_end(k) - edge_start(k)).normalized(); }
    // inward normal (counterclockwise orientation)
    Vec2 edge_normal(int k) const { return edge_tangent(k).rot90(); }

    // edges incident to vertex i: {i-1, i}
    std::array<int, 2> edges_at_vertex(int i) const;
    // endpoint vertices of edge k: {k, k+1 mod n}
    std::array<int, 2> vertices_of_edge(int k) const;
    double interior_angle(int i) const;

    double area() const;
    double diameter() const;
    double min_edge_length() const;
    double min_vertex_separation() const;
    void bounding_box(Vec2& lo, Vec2& hi) const;

    bool contains(Vec2 p, double tol = 0.0) const;  // closure membership
    double boundary_distance(Vec2 p) const;

private:
    explicit Polygon(std::vector<Vec2> v) : vertices_(std::move(v)) {}
    void validate() const;
    std::vector<Vec2> vertices_;
};

struct DistanceSet {
    std::vector<double> r_v;  // per vertex
    std::vector<double> r_e;  // per edge
    // rho_ve = r_e / r_v for an incident pair, +infinity when r_v = 0
    double rho(int vertex, int edge) const;
};

// Distance functions at a point of closure(Omega); rejects points outside.
DistanceSet distances(const Polygon& poly, Vec2 x, double tol = 1e-12);

enum class RegionKind { kVertex, kVertexEdge, kEdge, kInterior };

struct RegionTag {
    RegionKind kind = RegionKind::kInterior;
    int vertex = -1;
    int edge = -1;

    bool operator==(const RegionTag& o) const {
        return kind == o.kind && vertex == o.vertex && edge == o.edge;
    }
    std::string label() const;
};

struct DecomposeOptions {
    double edge_exponent = 2.0;  // omega_e uses r_e < xi^edge_exponent
    int disjointness_samples = 20000;
    int max_halvings = 48;
    unsigned seed = 1;  // QMC offset for the sampling-based checks
};

// Partition of the polygon into vertex / vertex-edge / edge neighborhoods and
// the interior, with the scale parameter auto-halved until the sampled
// disjointness conditions hold.
class NeighborhoodDecomposition {
public:
    NeighborhoodDecomposition(Polygon poly, double xi_requested, double xi_effective,
                              DecomposeOptions opt);

    const Polygon& polygon() const { return poly_; }
    double xi() const { return xi_; }
    double xi_requested() const { return xi_requested_; }
    double edge_exponent() const { return opt_.edge_exponent; }

    // Raw membership predicates, verbatim from the defining conditions.
    bool in_vertex_nbhd(int vertex, Vec2 x) const;
    bool in_vertex_edge_nbhd(int vertex, int edge, Vec2 x) const;
    bool in_edge_nbhd(int edge, Vec2 x) const;

    // Tie-break priority: vertex > vertex-edge > edge > interior.
    RegionTag classify(Vec2 x) const;

    struct Region {
        RegionTag tag;
        double area_estimate = 0.0;
    };
    const std::vector<Region>& regions() const { return regions_; }
    const Region* find_region(const RegionTag& tag) const;

    // Measured distance from the sampled interior part to the boundary.
    double interior_boundary_distance() const { return interior_bdry_dist_; }

    void populate_statistics(int n_samples);

private:
    Polygon poly_;
    double xi_requested_;
    double xi_;
    DecomposeOptions opt_;
    std::vector<Region> regions_;
    double interior_bdry_dist_ = 0.0;
};

NeighborhoodDecomposition decompose(const Polygon& poly, double xi,
                                    const DecomposeOptions& opt = {});

// Halton low-discrepancy point in [0,1)^2 (bases 2 and 3).
Vec2 halton2(unsigned long long index);

// Deterministic quasi-Monte-Carlo samples inside the polygon.
std::vector<Vec2> sample_polygon(const Polygon& poly, int count, unsigned seed = 1);

}  // namespace fraclap
