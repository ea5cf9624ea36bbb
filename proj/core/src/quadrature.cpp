#include "bakhfem/quadrature.hpp"

#include "bakhfem/errors.hpp"

#include <cmath>
#include <numbers>

namespace bakhfem {

GaussLegendre1D::GaussLegendre1D(int n_) : n(n_) {
    if (n < 1 || n > 64)
        throw invalid_config("Gauss-Legendre order must be in [1, 64]");
    pts.resize(n);
    wts.resize(n);
    // Roots of P_n on [-1,1]; symmetric, so solve the upper half only.
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence: (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}
            double p0 = 1.0, p1 = x;
            for (int j = 1; j < n; ++j) {
                double p2 = ((2 * j + 1) * x * p1 - j * p0) / (j + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1,1] to [0,1]; k-th root is the largest.
        pts[k] = 0.5 * (1.0 - x);
        pts[n - 1 - k] = 0.5 * (1.0 + x);
        wts[k] = 0.5 * w;
        wts[n - 1 - k] = 0.5 * w;
    }
}

QuadratureRule::QuadratureRule(int order_) : order(order_), line(order_) {}

} // namespace bakhfem
