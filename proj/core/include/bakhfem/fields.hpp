#pragma once

#include <functional>

namespace bakhfem {

// 1D factor with derivatives: f(order, point) = d^order/dx^order at point.
using Factor1D = std::function<double(int, double)>;

// Scalar field on the unit square exposing mixed partials:
// deriv(m, n, x, y) = d^{m+n} f / dx^m dy^n.  Orders up to 3 are required by
// the interpolation identities; higher orders may return anything.
struct ScalarField2D {
    std::function<double(int, int, double, double)> deriv;

    double operator()(double x, double y) const { return deriv(0, 0, x, y); }
    double dx(double x, double y) const { return deriv(1, 0, x, y); }
    double dy(double x, double y) const { return deriv(0, 1, x, y); }
};

// Product f(x)*g(y) of two 1D factors; partials separate.
struct SeparablePart {
    Factor1D fx, fy;

    double deriv(int m, int n, double x, double y) const { return fx(m, x) * fy(n, y); }
    double operator()(double x, double y) const { return deriv(0, 0, x, y); }

    ScalarField2D field() const {
        return {[fx = fx, fy = fy](int m, int n, double x, double y) {
            return fx(m, x) * fy(n, y);
        }};
    }
};

} // namespace bakhfem
