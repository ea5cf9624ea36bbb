#pragma once

#include <vector>

namespace bakhfem {

// Gauss-Legendre nodes/weights on [0,1].  Nodes are computed once by Newton
// iteration on the Legendre recurrence; accurate to ~1 ulp for n <= 32.
struct GaussLegendre1D {
    explicit GaussLegendre1D(int n);
    int n;
    std::vector<double> pts; // in (0,1), ascending
    std::vector<double> wts; // sum to 1
};

// Tensor Gauss-Legendre rule on the reference square [0,1]^2, `order` points
// per direction.  Exact for polynomials of degree <= 2*order-1 per variable.
struct QuadratureRule {
    explicit QuadratureRule(int order);
    int order;
    GaussLegendre1D line; // shared 1D factor
};

} // namespace bakhfem
