#pragma once

#include "bakhfem/fields.hpp"

#include <string>
#include <vector>

namespace bakhfem {

// Data of the convection-diffusion problem
//   -eps*Lap(u) - b(x,y)*u_x + c(x,y)*u = f  on (0,1)^2,  u = 0 on the boundary,
// with b >= beta > 0 and c + b_x/2 >= gamma > 0 (the coercivity certificate).
struct CoefficientSet {
    std::function<double(double, double)> b, b_x, c, f;
    double beta = 1.0;  // certified lower bound of b
    double gamma = 1.0; // certified lower bound of c + b_x/2
};

// Exact solution split into a smooth part S, an exponential boundary-layer
// part E1 ~ exp(-x/eps), two characteristic layers E2 ~ exp(-y/sqrt(eps)) +
// exp(-(1-y)/sqrt(eps)), and the corner product E12.  All parts are products
// of 1D factors, so every mixed partial is available in closed form.
struct ManufacturedSolution {
    double epsilon = 0;
    SeparablePart S, E1, E2, E12;

    double u(double x, double y) const {
        return S(x, y) + E1(x, y) + E2(x, y) + E12(x, y);
    }
    double du(int m, int n, double x, double y) const {
        return S.deriv(m, n, x, y) + E1.deriv(m, n, x, y) + E2.deriv(m, n, x, y) +
               E12.deriv(m, n, x, y);
    }
    ScalarField2D u_field() const {
        return {[*this](int m, int n, double x, double y) { return du(m, n, x, y); }};
    }
};

struct TestProblem {
    CoefficientSet coefficients;
    ManufacturedSolution solution;
    std::string name;
};

// The standard study problem ("paper-s5"): b = 3-x-y, c = 2, and
//   u = (cos(pi*x/2) - (e^{-x/eps} - e^{-1/eps}) / (1 - e^{-1/eps}))
//       * (1 - e^{-y/rt}) * (1 - e^{-(1-y)/rt}) / (1 - e^{-1/rt}),  rt = sqrt(eps),
// with f = -eps*Lap(u) - b*u_x + c*u assembled analytically from the factors.
TestProblem test_problem(double epsilon);

struct ConsistencyReport {
    double max_residual = 0;   // max |–eps*Lap u – b u_x + c u – f| over samples
    double max_f = 0;          // max |f| over the same samples
    double relative() const { return max_f > 0 ? max_residual / max_f : max_residual; }
};

// Checks f against second-order central finite differences of the solution
// callable at the given sample points.  `step` defaults to 1e-4, suitable for
// samples away from the layers; near-layer samples should scale it with the
// local layer width.
ConsistencyReport validate_operator_consistency(const TestProblem& p,
                                                const std::vector<std::pair<double, double>>& samples,
                                                double step = 1e-4);

struct DecompositionBoundEntry {
    std::string part; // "S", "E1", "E2", "E12"
    int m = 0, n = 0;
    double max_ratio = 0; // |d^{m+n} part| / envelope, max over samples
};

// Ratios of each part's derivatives to its layer envelope:
//   S: 1,  E1: eps^-m e^{-beta x/eps},
//   E2: eps^{-n/2} (e^{-y/rt} + e^{-(1-y)/rt}),  E12: product form.
// Sampled on a uniform grid; all orders m+n <= order_max.
std::vector<DecompositionBoundEntry> validate_decomposition_bounds(
    const ManufacturedSolution& ms, double beta, int order_max = 2, int grid = 41);

} // namespace bakhfem
