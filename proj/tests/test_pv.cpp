#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fraclap/fields.hpp"
#include "fraclap/pv.hpp"
#include "fraclap/special.hpp"

using namespace fraclap;

namespace {

// Brute-force trapezoid oracle for the symmetrized principal value
//   C(1,s) int_0^inf (2u(x)-u(x+t)-u(x-t)) / t^{1+2s} dt
// with the substitution t = tau^2 so the integrand is bounded at 0, plus the
// closed-form tail where u vanishes. u must vanish outside (-1,1).
double pv_trapezoid_oracle(const Field1D& u, double x, double s, long n_points) {
    const double T = 4.0;
    const double tau_max = std::sqrt(T);
    const double h = tau_max / static_cast<double>(n_points);
    const double ux = u.value(x);
    auto f = [&](double tau) {
        const double t = tau * tau;
        if (t == 0.0) return 0.0;
        const double num = 2.0 * ux - u.value(x + t) - u.value(x - t);
        return num * std::pow(t, -1.0 - 2.0 * s) * 2.0 * tau;
    };
    double acc = 0.5 * (f(0.0) + f(tau_max));
    for (long i = 1; i < n_points; ++i) acc += f(h * static_cast<double>(i));
    acc *= h;
    // beyond T both u(x+t) and u(x-t) vanish
    acc += 2.0 * ux * std::pow(T, -2.0 * s) / (2.0 * s);
    return kernel_constant(1, s) * acc;
}

}  // namespace

TEST_CASE("Getoor identity at the center and off-center points") {
    for (double s : {0.25, 0.5, 0.75}) {
        const FractionalParams p = FractionalParams::make(s, 1);
        auto u = fields::bump_power(s);
        PvOptions opt;
        opt.support = {{-1.0, 1.0}};
        const double want = getoor_constant(1, s);
        for (double x : {0.0, 0.3, -0.45}) {
            const double got = pv_apply(*u, x, p, opt);
            CHECK(got == doctest::Approx(want).epsilon(2e-7));
        }
    }
}

TEST_CASE("Getoor for s=1/2 equals 1 within 1e-6") {
    const FractionalParams p = FractionalParams::make(0.5, 1);
    auto u = fields::bump_power(0.5);
    PvOptions opt;
    opt.support = {{-1.0, 1.0}};
    CHECK(std::abs(pv_apply(*u, 0.0, p, opt) - 1.0) < 1e-6);
}

TEST_CASE("brute-force trapezoid oracle agrees") {
    const double s = 0.5;
    const FractionalParams p = FractionalParams::make(s, 1);
    auto u = fields::bump_power(s);
    PvOptions opt;
    opt.support = {{-1.0, 1.0}};
    const double got = pv_apply(*u, 0.0, p, opt);
    const double brute = pv_trapezoid_oracle(*u, 0.0, s, 2'000'000);
    CHECK(std::abs(got - brute) < 1e-4);
}

TEST_CASE("constant field in test mode maps to zero") {
    const FractionalParams p = FractionalParams::make(0.4, 1);
    auto u = fields::constant(3.7);
    PvOptions opt;  // no support: globally defined test mode
    CHECK(std::abs(pv_apply(*u, 0.2, p, opt)) < 1e-12);
}

TEST_CASE("rhs of the s=1/4 profile is constant across points") {
    const double s = 0.25;
    const FractionalParams p = FractionalParams::make(s, 1);
    auto u = fields::bump_power(s);
    PvOptions opt;
    opt.support = {{-1.0, 1.0}};
    const double v0 = pv_apply(*u, 0.0, p, opt);
    const double v1 = pv_apply(*u, 0.5, p, opt);
    CHECK(v0 == doctest::Approx(v1).epsilon(1e-6));
    CHECK(v0 == doctest::Approx(getoor_constant(1, s)).epsilon(1e-6));
}

TEST_CASE("pv_apply is linear in u") {
    const FractionalParams p = FractionalParams::make(0.5, 1);
    auto u = fields::bump_power(0.5);
    auto v = fields::bump_power(0.6);
    auto w = fields::linear_combination(2.0, u, -0.5, v);
    PvOptions opt;
    opt.support = {{-1.0, 1.0}};
    const double lhs = pv_apply(*w, 0.25, p, opt);
    const double rhs = 2.0 * pv_apply(*u, 0.25, p, opt) - 0.5 * pv_apply(*v, 0.25, p, opt);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}
