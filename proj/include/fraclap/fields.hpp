#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace fraclap {

// A scalar function of one variable exposing derivatives up to max_order().
// Discrete implementations report their mesh scale through resolution();
// analytic ones return 0.
class Field1D {
public:
    virtual ~Field1D() = default;
    // order 0 is the value itself.
    virtual double derivative(double x, int order) const = 0;
    virtual int max_order() const = 0;
    virtual double resolution() const { return 0.0; }

    double value(double x) const { return derivative(x, 0); }
};

// Analytic field backed by a closed-form derivative family.
class AnalyticField1D final : public Field1D {
public:
    AnalyticField1D(std::function<double(double, int)> family, int pmax)
        : family_(std::move(family)), pmax_(pmax) {}

    double derivative(double x, int order) const override;
    int max_order() const override { return pmax_; }

private:
    std::function<double(double, int)> family_;
    int pmax_;
};

// Function on the half-space slab (x,y), y >= 0, with mixed derivatives.
class SlabField {
public:
    virtual ~SlabField() = default;
    virtual double derivative(double x, double y, int dx, int dy) const = 0;
    virtual int max_order() const = 0;
    virtual double resolution() const { return 0.0; }

    double value(double x, double y) const { return derivative(x, y, 0, 0); }
};

class AnalyticSlabField final : public SlabField {
public:
    AnalyticSlabField(std::function<double(double, double, int, int)> family, int pmax)
        : family_(std::move(family)), pmax_(pmax) {}

    double derivative(double x, double y, int dx, int dy) const override {
        return family_(x, y, dx, dy);
    }
    int max_order() const override { return pmax_; }

private:
    std::function<double(double, double, int, int)> family_;
    int pmax_;
};

namespace fields {

// x^s on x > 0, zero on x <= 0; all derivatives are falling-factorial powers.
std::shared_ptr<Field1D> power(double s, int pmax = 24);

// (1 - x^2)_+^s with derivatives up to order 2 on the open unit interval.
std::shared_ptr<Field1D> bump_power(double s);

// amplitude * sin(k x + phase)
std::shared_ptr<Field1D> sine(double k, double amplitude = 1.0, double phase = 0.0);

std::shared_ptr<Field1D> constant(double c);

// exp(a x)
std::shared_ptr<Field1D> exponential(double a = 1.0);

// Polynomial with monomial coefficients c0 + c1 x + ...
std::shared_ptr<Field1D> polynomial(std::vector<double> coeffs);

// a*u + b*v with derivative-wise linearity.
std::shared_ptr<Field1D> linear_combination(double a, std::shared_ptr<Field1D> u, double b,
                                            std::shared_ptr<Field1D> v);

// e^{-k y} sin(k x): the harmonic (s = 1/2) half-space extension of sin(k x).
std::shared_ptr<SlabField> harmonic_extension_sine(double k);

}  // namespace fields

}  // namespace fraclap
