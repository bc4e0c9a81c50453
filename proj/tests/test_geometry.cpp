#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fraclap/geometry.hpp"

using namespace fraclap;

namespace {

// brute-force point-segment distance by dense parameter sampling
double brute_segment_distance(Vec2 p, Vec2 a, Vec2 b, int n = 20000) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const Vec2 q = a + (b - a) * (static_cast<double>(i) / n);
        best = std::min(best, (p - q).norm());
    }
    return best;
}

// independent re-implementation of the three defining predicates
struct OracleTag {
    int kind;  // 0 vertex, 1 ve, 2 edge, 3 interior
    int vertex = -1;
    int edge = -1;
};

OracleTag oracle_classify(const Polygon& poly, double xi, double edge_exp, Vec2 x) {
    const int n = poly.n();
    std::vector<double> rv(n), re(n);
    for (int i = 0; i < n; ++i) rv[i] = (x - poly.vertex(i)).norm();
    for (int k = 0; k < n; ++k)
        re[k] = brute_segment_distance(x, poly.edge_start(k), poly.edge_end(k), 4000);
    auto rho = [&](int v, int e) {
        return rv[v] == 0.0 ? std::numeric_limits<double>::infinity() : re[e] / rv[v];
    };
    for (int v = 0; v < n; ++v) {
        if (rv[v] >= xi) continue;
        bool ok = true;
        for (int e : {(v + n - 1) % n, v})
            if (rho(v, e) < xi) ok = false;
        if (ok) return {0, v, -1};
    }
    for (int v = 0; v < n; ++v) {
        if (rv[v] >= xi) continue;
        for (int e : {(v + n - 1) % n, v})
            if (rho(v, e) < xi) return {1, v, e};
    }
    for (int k = 0; k < n; ++k) {
        if (re[k] >= std::pow(xi, edge_exp)) continue;
        bool away = true;
        for (int v : {k, (k + 1) % n})
            if (rv[v] < xi) away = false;
        if (away) return {2, -1, k};
    }
    return {3, -1, -1};
}

}  // namespace

TEST_CASE("unit square center distances by symmetry") {
    const Polygon sq = Polygon::unit_square();
    const DistanceSet d = distances(sq, {0.5, 0.5});
    for (int i = 0; i < 4; ++i) CHECK(d.r_v[i] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
    for (int k = 0; k < 4; ++k) CHECK(d.r_e[k] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("distance at a vertex is zero and rho is +inf") {
    const Polygon sq = Polygon::unit_square();
    const DistanceSet d = distances(sq, {0.0, 0.0});
    CHECK(d.r_v[0] == 0.0);
    CHECK(std::isinf(d.rho(0, 0)));
}

TEST_CASE("L-shape distances match the brute-force segment oracle") {
    const Polygon L = Polygon::l_shape();
    const Vec2 x{0.25, 0.25};
    const DistanceSet d = distances(L, x);
    for (int k = 0; k < L.n(); ++k) {
        const double want = brute_segment_distance(x, L.edge_start(k), L.edge_end(k));
        CHECK(d.r_e[k] == doctest::Approx(want).epsilon(1e-7));
    }
    for (int i = 0; i < L.n(); ++i)
        CHECK(d.r_v[i] == doctest::Approx((x - L.vertex(i)).norm()).epsilon(1e-14));
}

TEST_CASE("points outside the closure are rejected") {
    const Polygon sq = Polygon::unit_square();
    CHECK_THROWS_AS(distances(sq, {1.5, 0.5}), std::domain_error);
    CHECK_THROWS_AS(distances(sq, {-0.001, 0.5}), std::domain_error);
}

TEST_CASE("degenerate polygons are rejected") {
    CHECK_THROWS_AS(Polygon::from_vertices({{0, 0}, {1, 0}}), std::invalid_argument);
    // self-intersecting bowtie
    CHECK_THROWS_AS(Polygon::from_vertices({{0, 0}, {1, 1}, {1, 0}, {0, 1}}),
                    std::invalid_argument);
    // repeated vertex
    CHECK_THROWS_AS(Polygon::from_vertices({{0, 0}, {0, 0}, {1, 0}, {1, 1}}),
                    std::invalid_argument);
}

TEST_CASE("polygon JSON round trip") {
    const Polygon L = Polygon::l_shape();
    const Polygon L2 = Polygon::from_json(L.to_json());
    REQUIRE(L2.n() == L.n());
    for (int i = 0; i < L.n(); ++i) {
        CHECK(L2.vertex(i).x == L.vertex(i).x);
        CHECK(L2.vertex(i).y == L.vertex(i).y);
    }
}

TEST_CASE("classification predicates: direct examples") {
    const Polygon tri = Polygon::sector_triangle(2.0);
    const double xi = 0.2;
    DecomposeOptions opt;
    const NeighborhoodDecomposition dec = decompose(tri, xi, opt);
    REQUIRE(dec.xi() == doctest::Approx(xi));
    // point near the right-angle vertex with both rho >= xi: on the bisector
    {
        const double r = 0.5 * dec.xi();
        const Vec2 p{r * std::cos(M_PI / 4), r * std::sin(M_PI / 4)};
        CHECK(dec.classify(p).kind == RegionKind::kVertex);
        CHECK(dec.classify(p).vertex == 0);
    }
    // point with r_v < xi and rho < xi for the bottom edge
    {
        const double r = 0.5 * dec.xi();
        const double th = 0.5 * std::asin(dec.xi());
        const Vec2 p{r * std::cos(th), r * std::sin(th)};
        const RegionTag t = dec.classify(p);
        CHECK(t.kind == RegionKind::kVertexEdge);
        CHECK(t.vertex == 0);
    }
    // point away from vertices with r_e < xi^2
    {
        const Vec2 p{1.0, 0.5 * dec.xi() * dec.xi()};
        const RegionTag t = dec.classify(p);
        CHECK(t.kind == RegionKind::kEdge);
        CHECK(t.edge == 0);
    }
    // deep interior
    CHECK(dec.classify({0.5, 0.5}).kind == RegionKind::kInterior);
}

TEST_CASE("classification matches an independent predicate oracle on the L-shape") {
    const Polygon L = Polygon::l_shape();
    const NeighborhoodDecomposition dec = decompose(L, 0.1);
    const std::vector<Vec2> pts = sample_polygon(L, 20000, 5);
    long agree = 0;
    for (const Vec2& p : pts) {
        const RegionTag got = dec.classify(p);
        const OracleTag want = oracle_classify(L, dec.xi(), dec.edge_exponent(), p);
        const bool same = (static_cast<int>(got.kind) == want.kind) &&
                          (want.kind != 0 || got.vertex == want.vertex) &&
                          (want.kind != 2 || got.edge == want.edge) &&
                          (want.kind != 1 || (got.vertex == want.vertex && got.edge == want.edge));
        agree += same ? 1 : 0;
    }
    CHECK(agree == static_cast<long>(pts.size()));
}

TEST_CASE("xi is halved until sampled disjointness holds") {
    const Polygon sq = Polygon::unit_square();
    // far too large: omega_v of adjacent vertices would overlap
    const NeighborhoodDecomposition dec = decompose(sq, 10.0);
    CHECK(dec.xi() < 10.0);
    CHECK(dec.xi_requested() == 10.0);
    CHECK_THROWS_AS(decompose(sq, -1.0), std::invalid_argument);
}

TEST_CASE("region membership invariants on samples") {
    const Polygon L = Polygon::l_shape();
    NeighborhoodDecomposition dec = decompose(L, 0.12);
    dec.populate_statistics(20000);
    // r_e <= r_v on omega_ve for the claiming pair, and r_e ~ r_v on omega_v
    const std::vector<Vec2> pts = sample_polygon(L, 30000, 9);
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (const Vec2& p : pts) {
        const RegionTag t = dec.classify(p);
        const DistanceSet d = distances(L, p);
        if (t.kind == RegionKind::kVertexEdge) {
            CHECK(d.r_e[t.edge] <= d.r_v[t.vertex] * (1.0 + 1e-12));
        } else if (t.kind == RegionKind::kVertex) {
            double re_min = std::numeric_limits<double>::infinity();
            for (int e : L.edges_at_vertex(t.vertex)) re_min = std::min(re_min, d.r_e[e]);
            const double ratio = re_min / d.r_v[t.vertex];
            cmin = std::min(cmin, ratio);
            cmax = std::max(cmax, ratio);
        }
    }
    // two-sided bound r_e ~ r_v on omega_v with finite measured constants
    CHECK(cmin >= dec.xi() * (1.0 - 1e-12));
    CHECK(cmax <= 1.0 + 1e-12);
    CHECK(cmin > 0.0);
    // interior part keeps a positive distance from the boundary
    CHECK(dec.interior_boundary_distance() > 0.0);
    // region area estimates sum to the polygon area
    double total = 0.0;
    for (const auto& r : dec.regions()) total += r.area_estimate;
    CHECK(total == doctest::Approx(L.area()).epsilon(1e-9));
}

TEST_CASE("classification partition: exactly one region claims each sample") {
    const Polygon sq = Polygon::unit_square();
    const NeighborhoodDecomposition dec = decompose(sq, 0.15);
    const std::vector<Vec2> pts = sample_polygon(sq, 10000, 3);
    for (const Vec2& p : pts) {
        int claims = 0;
        for (int v = 0; v < sq.n(); ++v)
            if (dec.in_vertex_nbhd(v, p)) ++claims;
        for (int v = 0; v < sq.n(); ++v)
            for (int e : sq.edges_at_vertex(v))
                if (dec.in_vertex_edge_nbhd(v, e, p)) ++claims;
        for (int e = 0; e < sq.n(); ++e)
            if (dec.in_edge_nbhd(e, p)) ++claims;
        // raw predicates of DIFFERENT kinds may both hold only in the
        // tie-break priority sense; the classifier must pick exactly one
        const RegionTag t = dec.classify(p);
        if (claims == 0) CHECK(t.kind == RegionKind::kInterior);
        if (t.kind == RegionKind::kInterior) CHECK(claims == 0);
    }
}
