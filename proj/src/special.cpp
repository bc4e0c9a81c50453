#include "fraclap/special.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_valid(int d, double s) {
    if (d != 1 && d != 2) throw std::domain_error("fractional constants: d must be 1 or 2");
    if (!(s > 0.0 && s < 1.0))
        throw std::domain_error("fractional constants: s must lie strictly in (0,1)");
}

}  // namespace

double kernel_constant(int d, double s) {
    require_valid(d, s);
    // Gamma(-s) = -pi / (sin(pi s) Gamma(1+s)); the leading minus signs cancel,
    // so everything is evaluated in logs of positive quantities.
    const double log_c = 2.0 * s * std::log(2.0) + std::lgamma(s + 0.5 * d) -
                         0.5 * d * std::log(kPi) - std::log(kPi) + std::log(std::sin(kPi * s)) +
                         std::lgamma(1.0 + s);
    return std::exp(log_c);
}

double dtn_constant(double s) {
    if (!(s > 0.0 && s < 1.0))
        throw std::domain_error("dtn_constant: s must lie strictly in (0,1)");
    return std::exp((2.0 * s - 1.0) * std::log(2.0) + std::lgamma(s) - std::lgamma(1.0 - s));
}

double getoor_constant(int d, double s) {
    require_valid(d, s);
    return std::exp(2.0 * s * std::log(2.0) + std::lgamma(1.0 + s) + std::lgamma(s + 0.5 * d) -
                    std::lgamma(0.5 * d));
}

FractionalParams FractionalParams::make(double s, int d) {
    require_valid(d, s);
    return FractionalParams{s, 1.0 - 2.0 * s, d, kernel_constant(d, s), dtn_constant(s)};
}

}  // namespace fraclap
