#include "fraclap/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclap {

double AnalyticField1D::derivative(double x, int order) const {
    if (order < 0 || order > pmax_)
        throw std::invalid_argument("AnalyticField1D: derivative order out of range");
    return family_(x, order);
}

namespace fields {

std::shared_ptr<Field1D> power(double s, int pmax) {
    auto family = [s](double x, int order) -> double {
        if (x <= 0.0) return 0.0;
        double coeff = 1.0;
        for (int k = 0; k < order; ++k) coeff *= (s - k);
        return coeff * std::pow(x, s - order);
    };
    return std::make_shared<AnalyticField1D>(family, pmax);
}

std::shared_ptr<Field1D> bump_power(double s) {
    auto family = [s](double x, int order) -> double {
        const double g = 1.0 - x * x;
        if (g <= 0.0) return 0.0;
        switch (order) {
            case 0:
                return std::pow(g, s);
            case 1:
                return -2.0 * s * x * std::pow(g, s - 1.0);
            case 2:
                return -2.0 * s * std::pow(g, s - 1.0) +
                       4.0 * s * (s - 1.0) * x * x * std::pow(g, s - 2.0);
            default:
                throw std::invalid_argument("bump_power: derivatives above order 2 not stored");
        }
    };
    return std::make_shared<AnalyticField1D>(family, 2);
}

std::shared_ptr<Field1D> sine(double k, double amplitude, double phase) {
    auto family = [k, amplitude, phase](double x, int order) {
        constexpr double half_pi = 1.57079632679489661923;
        return amplitude * std::pow(k, order) * std::sin(k * x + phase + order * half_pi);
    };
    return std::make_shared<AnalyticField1D>(family, 64);
}

std::shared_ptr<Field1D> constant(double c) {
    auto family = [c](double, int order) { return order == 0 ? c : 0.0; };
    return std::make_shared<AnalyticField1D>(family, 64);
}

std::shared_ptr<Field1D> exponential(double a) {
    auto family = [a](double x, int order) { return std::pow(a, order) * std::exp(a * x); };
    return std::make_shared<AnalyticField1D>(family, 64);
}

std::shared_ptr<Field1D> polynomial(std::vector<double> coeffs) {
    auto family = [c = std::move(coeffs)](double x, int order) {
        // sum_{j>=order} c_j * j!/(j-order)! * x^{j-order}, Horner form
        double acc = 0.0;
        for (size_t j = c.size(); j-- > static_cast<size_t>(order);) {
            double fall = 1.0;
            for (int k = 0; k < order; ++k) fall *= static_cast<double>(j - k);
            acc = acc * x + fall * c[j];
        }
        return acc;
    };
    return std::make_shared<AnalyticField1D>(family, 64);
}

std::shared_ptr<Field1D> linear_combination(double a, std::shared_ptr<Field1D> u, double b,
                                            std::shared_ptr<Field1D> v) {
    const int pmax = std::min(u->max_order(), v->max_order());
    auto family = [a, u, b, v](double x, int order) {
        return a * u->derivative(x, order) + b * v->derivative(x, order);
    };
    return std::make_shared<AnalyticField1D>(family, pmax);
}

std::shared_ptr<SlabField> harmonic_extension_sine(double k) {
    auto family = [k](double x, double y, int dx, int dy) {
        constexpr double half_pi = 1.57079632679489661923;
        const double sign = (dy % 2 == 0) ? 1.0 : -1.0;
        return sign * std::pow(k, dx + dy) * std::exp(-k * y) * std::sin(k * x + dx * half_pi);
    };
    return std::make_shared<AnalyticSlabField>(family, 64);
}

}  // namespace fields

}  // namespace fraclap
