#include "bakhfem/problem.hpp"

#include "bakhfem/errors.hpp"

#include <cmath>
#include <numbers>

namespace bakhfem {

TestProblem test_problem(double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw invalid_config("test_problem: epsilon must lie in (0,1)");

    const double eps = epsilon;
    const double rt = std::sqrt(eps);
    const double D = 1.0 - std::exp(-1.0 / eps);   // >= 1 - e^-1 for eps <= 1
    const double Dy = 1.0 - std::exp(-1.0 / rt);
    const double K = std::exp(-1.0 / eps) / D;     // constant lift of the x factor
    const double hs = (1.0 + std::exp(-1.0 / rt)) / Dy;

    // x factors: cos(pi*x/2) + K, and the layer -e^{-x/eps}/D.
    Factor1D gs = [K](int m, double x) {
        const double a = std::numbers::pi / 2.0;
        double v = std::pow(a, m) * std::cos(a * x + m * std::numbers::pi / 2.0);
        return m == 0 ? v + K : v;
    };
    Factor1D ge = [eps, D](int m, double x) {
        double s = (m % 2 == 0) ? -1.0 : 1.0; // -(-1/eps)^m
        return s * std::pow(eps, -m) * std::exp(-x / eps) / D;
    };
    // y factors: the constant (1+e^{-1/rt})/Dy and the two-sided layer
    // -(e^{-y/rt} + e^{-(1-y)/rt})/Dy.
    Factor1D hsf = [hs](int n, double) { return n == 0 ? hs : 0.0; };
    Factor1D hp = [rt, Dy](int n, double y) {
        double s0 = (n % 2 == 0) ? 1.0 : -1.0; // (-1/rt)^n sign
        double r = std::pow(rt, -n);
        return -(s0 * r * std::exp(-y / rt) + r * std::exp(-(1.0 - y) / rt)) / Dy;
    };

    ManufacturedSolution ms;
    ms.epsilon = eps;
    ms.S = {gs, hsf};
    ms.E1 = {ge, hsf};
    ms.E2 = {gs, hp};
    ms.E12 = {ge, hp};

    CoefficientSet cs;
    cs.b = [](double x, double y) { return 3.0 - x - y; };
    cs.b_x = [](double, double) { return -1.0; };
    cs.c = [](double, double) { return 2.0; };
    cs.beta = 1.0;   // min of b on the closed square, attained at (1,1)
    cs.gamma = 1.5;  // c + b_x/2
    cs.f = [ms, eps](double x, double y) {
        return -eps * (ms.du(2, 0, x, y) + ms.du(0, 2, x, y)) -
               (3.0 - x - y) * ms.du(1, 0, x, y) + 2.0 * ms.u(x, y);
    };

    return {std::move(cs), std::move(ms), "paper-s5"};
}

ConsistencyReport validate_operator_consistency(
    const TestProblem& p, const std::vector<std::pair<double, double>>& samples, double step) {
    if (!(step > 0.0))
        throw invalid_config("validate_operator_consistency: step must be positive");
    ConsistencyReport rep;
    const auto& ms = p.solution;
    const auto& cs = p.coefficients;
    for (auto [x, y] : samples) {
        if (x - step <= 0.0 || x + step >= 1.0 || y - step <= 0.0 || y + step >= 1.0)
            throw invalid_config("validate_operator_consistency: sample too close to the "
                                 "boundary for the given step");
        const double u0 = ms.u(x, y);
        const double ux = (ms.u(x + step, y) - ms.u(x - step, y)) / (2.0 * step);
        const double uxx = (ms.u(x + step, y) - 2.0 * u0 + ms.u(x - step, y)) / (step * step);
        const double uyy = (ms.u(x, y + step) - 2.0 * u0 + ms.u(x, y - step)) / (step * step);
        const double f = cs.f(x, y);
        const double res = std::abs(-ms.epsilon * (uxx + uyy) - cs.b(x, y) * ux +
                                    cs.c(x, y) * u0 - f);
        rep.max_residual = std::max(rep.max_residual, res);
        rep.max_f = std::max(rep.max_f, std::abs(f));
    }
    return rep;
}

std::vector<DecompositionBoundEntry> validate_decomposition_bounds(
    const ManufacturedSolution& ms, double beta, int order_max, int grid) {
    const double eps = ms.epsilon;
    const double rt = std::sqrt(eps);
    std::vector<DecompositionBoundEntry> out;
    for (int m = 0; m <= order_max; ++m) {
        for (int n = 0; m + n <= order_max; ++n) {
            DecompositionBoundEntry eS{"S", m, n, 0.0}, e1{"E1", m, n, 0.0},
                e2{"E2", m, n, 0.0}, e12{"E12", m, n, 0.0};
            for (int i = 0; i < grid; ++i) {
                for (int j = 0; j < grid; ++j) {
                    const double x = double(i) / (grid - 1);
                    const double y = double(j) / (grid - 1);
                    const double ex = std::exp(-beta * x / eps);
                    const double ey = std::exp(-y / rt) + std::exp(-(1.0 - y) / rt);
                    eS.max_ratio = std::max(eS.max_ratio, std::abs(ms.S.deriv(m, n, x, y)));
                    // Skip samples where the envelope underflows: there the
                    // part itself is identically zero in double precision.
                    if (ex > 1e-290) {
                        double env1 = std::pow(eps, -m) * ex;
                        e1.max_ratio = std::max(
                            e1.max_ratio, std::abs(ms.E1.deriv(m, n, x, y)) / env1);
                        double env12 = std::pow(eps, -m - 0.5 * n) * ex * ey;
                        e12.max_ratio = std::max(
                            e12.max_ratio, std::abs(ms.E12.deriv(m, n, x, y)) / env12);
                    }
                    double env2 = std::pow(eps, -0.5 * n) * ey;
                    e2.max_ratio =
                        std::max(e2.max_ratio, std::abs(ms.E2.deriv(m, n, x, y)) / env2);
                }
            }
            out.push_back(eS);
            out.push_back(e1);
            out.push_back(e2);
            out.push_back(e12);
        }
    }
    return out;
}

} // namespace bakhfem
