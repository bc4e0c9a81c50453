#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fraclap/quadrature.hpp"

using namespace fraclap;

TEST_CASE("weighted unit moments match 1/(1+alpha)") {
    for (double alpha : {-0.5, 0.0, 0.5}) {
        const QuadratureRule r = gauss_jacobi(alpha, 12, 0.0, 1.0);
        const double got = r.integrate([](double) { return 1.0; });
        CHECK(std::abs(got - 1.0 / (1.0 + alpha)) < 1e-14);
    }
}

TEST_CASE("monomial moments up to degree 2n-1 match the Beta closed form") {
    // int_0^1 x^alpha x^k dx = 1/(alpha+k+1)
    for (double alpha : {-0.7, -0.25, 0.0, 0.4, 1.5}) {
        for (int n : {1, 2, 4, 8, 16}) {
            const QuadratureRule r = gauss_jacobi(alpha, n, 0.0, 1.0);
            for (int k = 0; k <= r.exact_degree(); ++k) {
                const double got = r.integrate([k](double x) { return std::pow(x, k); });
                const double want = 1.0 / (alpha + k + 1.0);
                CHECK(std::abs(got - want) < 1e-13 * std::abs(want) + 1e-15);
            }
        }
    }
}

TEST_CASE("mapped interval moments") {
    // int_a^b (x-a)^alpha (x-a)^k dx = (b-a)^{alpha+k+1}/(alpha+k+1)
    const double a = 0.25, b = 2.0, alpha = -0.5;
    const QuadratureRule r = gauss_jacobi(alpha, 10, a, b);
    for (int k = 0; k < 6; ++k) {
        const double got = r.integrate([&](double x) { return std::pow(x - a, k); });
        const double want = std::pow(b - a, alpha + k + 1.0) / (alpha + k + 1.0);
        CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("weights positive up to n = 64") {
    for (double alpha : {-0.9, -0.5, 0.0, 0.5, 1.0}) {
        for (int n : {1, 2, 8, 32, 64}) {
            const QuadratureRule r = gauss_jacobi(alpha, n, 0.0, 1.0);
            for (double w : r.weights) CHECK(w > 0.0);
            for (double x : r.nodes) {
                CHECK(x > 0.0);
                CHECK(x < 1.0);
            }
        }
    }
}

TEST_CASE("invalid weight exponent rejected") {
    CHECK_THROWS_AS(gauss_jacobi(-1.0, 4, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gauss_jacobi(-1.5, 4, 0.0, 1.0), std::domain_error);
}

TEST_CASE("disk round trip for cached rules") {
    const std::string dir = "./quad_cache_test";
    save_rule_to_disk(dir, -0.5, 7);
    QuadratureRule r;
    REQUIRE(load_rule_from_disk(dir, -0.5, 7, r));
    const QuadratureRule& ref = cached_gauss_jacobi(-0.5, 7);
    for (int i = 0; i < 7; ++i) {
        CHECK(r.nodes[i] == doctest::Approx(ref.nodes[i]).epsilon(1e-15));
        CHECK(r.weights[i] == doctest::Approx(ref.weights[i]).epsilon(1e-15));
    }
}
