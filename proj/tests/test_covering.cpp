#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fraclap/covering.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/geometry.hpp"

using namespace fraclap;

namespace {

NeighborhoodDecomposition sector_dec(double xi = 0.25) {
    return decompose(Polygon::sector_triangle(2.0), xi);
}

}  // namespace

TEST_CASE("vertex covering: Monte-Carlo coverage and stable overlap") {
    const NeighborhoodDecomposition dec = sector_dec();
    CoverParams cp;
    cp.c = 0.25;
    cp.mc_samples = 100000;
    cp.floor_radius = 1e-9;  // keep the unit test quick; acceptance goes deeper
    const BallCovering cov = cover_vertex(dec, 0, cp);
    REQUIRE(!cov.empty());
    CHECK(cov.cert.coverage_samples >= 100000);
    CHECK(cov.cert.coverage_fraction == 1.0);
    CHECK(cov.cert.overlap_max >= 1);
    // overlap stable under sample doubling
    CHECK(cov.cert.overlap_max_doubled == cov.cert.overlap_max);
    // covering parameters in order
    CHECK(cov.c < cov.c_tilde);
    CHECK(cov.c_tilde < cov.c_hat);
    CHECK(cov.c_hat < 1.0);
}

TEST_CASE("vertex covering radii track the vertex distance (estimate-r_c)") {
    const NeighborhoodDecomposition dec = sector_dec();
    CoverParams cp;
    cp.c = 0.25;
    cp.mc_samples = 20000;
    cp.floor_radius = 1e-6;
    const BallCovering cov = cover_vertex(dec, 0, cp);
    CHECK(cov.cert.c_b >= 1.0);
    CHECK(cov.cert.c_b < 1.0 / cov.c_hat + 2.0);  // finite, order (1/c_hat)
    // stretched balls stay inside the polygon
    const Polygon& poly = dec.polygon();
    for (const CoverItem& it : cov.items)
        CHECK(poly.boundary_distance(it.center) >= cov.stretched_radius(it) * (1.0 - 1e-9));
}

TEST_CASE("vertex covering delta tails") {
    const NeighborhoodDecomposition dec = sector_dec();
    CoverParams cp;
    cp.c = 0.3;
    cp.mc_samples = 20000;
    cp.delta_probes = {0.5, 1.0};
    const BallCovering cov = cover_vertex(dec, 0, cp);
    REQUIRE(cov.delta_tails.size() == 2);
    for (const DeltaTail& t : cov.delta_tails) {
        CHECK(t.cauchy);
        CHECK(t.increment_ratio < std::pow(2.0, -t.delta) + 0.15);
        // nothing below the construction floor
        CHECK(t.tail_below_radius < 1e-6);
        CHECK(std::isfinite(t.extrapolated_remainder));
    }
}

TEST_CASE("empty vertex neighborhood gives the empty covering") {
    // xi = 1 on a right angle: rho = sin(theta) cannot reach 1 on positive measure
    DecomposeOptions opt;
    opt.disjointness_samples = 2000;
    const NeighborhoodDecomposition dec(Polygon::sector_triangle(2.0), 1.0, 1.0, opt);
    const BallCovering cov = cover_vertex(dec, 0, CoverParams{});
    CHECK(cov.empty());
    CHECK(cov.cert.coverage_fraction == 1.0);
}

TEST_CASE("infeasible stretch factor reports the feasible bound") {
    const NeighborhoodDecomposition dec = sector_dec();
    CoverParams cp;
    cp.c = 0.25;
    cp.c_hat = 0.95;  // stretched balls would exit the triangle
    CHECK_THROWS_AS(cover_vertex(dec, 0, cp), ParameterError);
    try {
        cover_vertex(dec, 0, cp);
    } catch (const ParameterError& e) {
        CHECK(e.feasible_bound() > 0.0);
        CHECK(e.feasible_bound() < 0.95);
    }
}

TEST_CASE("vertex-edge covering: geometric chain with half-ball containment") {
    const NeighborhoodDecomposition dec = sector_dec(0.2);
    CoverParams cp;
    cp.c = 0.3;
    cp.mc_samples = 20000;
    cp.floor_radius = 1e-8;
    const VertexEdgeCovering vec(dec, 0, 0, cp);
    const BallCovering& outer = vec.outer();
    REQUIRE(outer.items.size() > 10);
    // centers on the edge with geometrically decaying distances to the vertex
    for (size_t i = 1; i < outer.items.size(); ++i) {
        const double q = outer.items[i].anchor_dist / outer.items[i - 1].anchor_dist;
        CHECK(q < 1.0);
        CHECK(q == doctest::Approx(outer.items[1].anchor_dist / outer.items[0].anchor_dist)
                       .epsilon(1e-9));
    }
    CHECK(outer.cert.coverage_fraction == 1.0);
    CHECK(outer.cert.overlap_max >= 1);
    CHECK(outer.cert.overlap_max <= 6);
    // delta tails of the 1D chain converge for every probed delta
    for (const DeltaTail& t : outer.delta_tails) CHECK(t.cauchy);
}

TEST_CASE("vertex-edge subcovering covers its half-ball and stays contained") {
    const NeighborhoodDecomposition dec = sector_dec(0.2);
    CoverParams cp;
    cp.c = 0.3;
    cp.mc_samples = 5000;
    cp.floor_radius = 1e-6;
    const VertexEdgeCovering vec(dec, 0, 0, cp);
    SubCoverParams sp;
    sp.mc_samples = 10000;
    sp.floor_radius = 1e-7;
    const BallCovering sub = vec.subcovering(vec.n_half_balls() / 2, sp);
    CHECK(sub.cert.coverage_fraction == 1.0);
    CHECK(sub.cert.overlap_max >= 1);
    CHECK(sub.cert.overlap_max_doubled == sub.cert.overlap_max);
    // containment was verified during construction; spot-check the arithmetic
    const CoverItem& H = vec.outer().items[vec.n_half_balls() / 2];
    const double Rt = vec.outer().c_tilde * H.anchor_dist;
    for (size_t j = 0; j < std::min<size_t>(sub.items.size(), 200); ++j) {
        const CoverItem& B = sub.items[j];
        CHECK((B.center - H.center).norm() + sub.c_hat * B.anchor_dist <= Rt * (1.0 + 1e-9));
    }
}

TEST_CASE("degenerate stretch request c_hat = 1 is a parameter error") {
    const NeighborhoodDecomposition dec = sector_dec(0.2);
    CoverParams cp;
    cp.c = 0.3;
    cp.c_hat = 1.0;
    CHECK_THROWS_AS(VertexEdgeCovering(dec, 0, 0, cp), ParameterError);
}

TEST_CASE("xi too large for the requested c is a parameter error") {
    const NeighborhoodDecomposition dec = sector_dec(0.3);
    CoverParams cp;
    cp.c = 0.1;  // chain cannot cover a wedge of opening 0.3
    CHECK_THROWS_AS(VertexEdgeCovering(dec, 0, 0, cp), ParameterError);
}

TEST_CASE("edge covering: strip coverage by the row lattice") {
    const NeighborhoodDecomposition dec = sector_dec(0.25);
    CoverParams cp;
    cp.c = 0.3;
    cp.mc_samples = 100000;
    cp.max_items = 40000;
    const BallCovering cov = cover_edge(dec, 0, cp);
    REQUIRE(!cov.empty());
    CHECK(cov.cert.coverage_fraction == 1.0);
    CHECK(cov.cert.overlap_max >= 1);
    CHECK(cov.cert.overlap_max_doubled == cov.cert.overlap_max);
    // radii track the edge distance within the stretched balls
    CHECK(cov.cert.c_b < 1.0 / cov.c_hat + 2.0);
}

TEST_CASE("edge covering delta tails: converge for delta > 1, not for delta <= 1") {
    const NeighborhoodDecomposition dec = sector_dec(0.25);
    CoverParams cp;
    cp.c = 0.3;
    cp.mc_samples = 2000;
    cp.delta_probes = {1.0, 2.0};
    cp.max_items = 20000;
    const BallCovering cov = cover_edge(dec, 0, cp);
    REQUIRE(cov.delta_tails.size() == 2);
    // per-level counts grow like 1/R, so delta = 1 increments stay ~constant
    CHECK(!cov.delta_tails[0].cauchy);
    CHECK(cov.delta_tails[1].cauchy);
}

TEST_CASE("empty edge region gives the empty covering") {
    DecomposeOptions opt;
    opt.disjointness_samples = 2000;
    // xi so large that r_v >= xi never holds on the short triangle edges
    const NeighborhoodDecomposition dec(Polygon::sector_triangle(0.5), 2.0, 2.0, opt);
    const BallCovering cov = cover_edge(dec, 0, CoverParams{});
    CHECK(cov.empty());
}
