#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fraclap/special.hpp"

using namespace fraclap;

namespace {

// Direct evaluation through std::tgamma, including the negative argument;
// exercises a different code path than the log-gamma + reflection route.
double kernel_constant_oracle(int d, double s) {
    return -std::pow(2.0, 2.0 * s) * std::tgamma(s + 0.5 * d) /
           (std::pow(M_PI, 0.5 * d) * std::tgamma(-s));
}

}  // namespace

TEST_CASE("kernel constant at d=1, s=1/2 equals 1/pi") {
    CHECK(std::abs(kernel_constant(1, 0.5) - 1.0 / M_PI) < 1e-12);
}

TEST_CASE("kernel constant matches the direct-gamma oracle") {
    for (int d : {1, 2})
        for (double s : {0.05, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.95}) {
            const double got = kernel_constant(d, s);
            const double want = kernel_constant_oracle(d, s);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
            CHECK(got > 0.0);
        }
}

TEST_CASE("kernel constant decreases to zero as s -> 0+") {
    double prev = kernel_constant(1, 0.26);
    for (double s = 0.24; s > 0.005; s -= 0.02) {
        const double cur = kernel_constant(1, s);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(kernel_constant(1, 1e-7) < 1e-5);
}

TEST_CASE("dtn constant special values") {
    CHECK(std::abs(dtn_constant(0.5) - 1.0) < 1e-13);
    const double want_34 = std::sqrt(2.0) * std::tgamma(0.75) / std::tgamma(0.25);
    CHECK(dtn_constant(0.75) == doctest::Approx(want_34).epsilon(1e-13));
    const double want_14 = std::tgamma(0.25) / (std::sqrt(2.0) * std::tgamma(0.75));
    CHECK(dtn_constant(0.25) == doctest::Approx(want_14).epsilon(1e-13));
    // the two successive values multiply to 1 by the reflection identity
    CHECK(dtn_constant(0.25) * dtn_constant(0.75) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("dtn reflection identity over a grid") {
    for (double s = 0.1; s < 0.95; s += 0.1)
        CHECK(dtn_constant(s) * dtn_constant(1.0 - s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("domain errors at the s boundaries") {
    CHECK_THROWS_AS(kernel_constant(1, 0.0), std::domain_error);
    CHECK_THROWS_AS(kernel_constant(1, 1.0), std::domain_error);
    CHECK_THROWS_AS(kernel_constant(3, 0.5), std::domain_error);
    CHECK_THROWS_AS(dtn_constant(-0.1), std::domain_error);
    CHECK_THROWS_AS(dtn_constant(1.0), std::domain_error);
}

TEST_CASE("getoor constant reduces to 1 at d=1, s=1/2") {
    // 2 Gamma(3/2) Gamma(1) / Gamma(1/2) = 1
    CHECK(getoor_constant(1, 0.5) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("params bundle is consistent") {
    const FractionalParams p = FractionalParams::make(0.3, 1);
    CHECK(p.alpha == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(p.C_ds == doctest::Approx(kernel_constant(1, 0.3)).epsilon(1e-15));
    CHECK(p.d_s == doctest::Approx(dtn_constant(0.3)).epsilon(1e-15));
}
