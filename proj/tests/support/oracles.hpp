#pragma once

// Reference implementations the tests check the library against.  Everything
// here is deliberately brute force and shares no code with the library paths
// under test.

#include "bakhfem/fields.hpp"
#include "bakhfem/mesh.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

// Dense Gaussian elimination with partial pivoting, A row-major n*n.
inline std::vector<double> dense_solve(std::vector<double> A, std::vector<double> b) {
    const int n = int(b.size());
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int r = k + 1; r < n; ++r)
            if (std::abs(A[size_t(r) * n + k]) > std::abs(A[size_t(p) * n + k]))
                p = r;
        if (A[size_t(p) * n + k] == 0.0)
            throw std::runtime_error("dense_solve: singular matrix");
        if (p != k) {
            for (int c = k; c < n; ++c)
                std::swap(A[size_t(p) * n + c], A[size_t(k) * n + c]);
            std::swap(b[p], b[k]);
        }
        for (int r = k + 1; r < n; ++r) {
            const double m = A[size_t(r) * n + k] / A[size_t(k) * n + k];
            if (m == 0.0)
                continue;
            for (int c = k; c < n; ++c)
                A[size_t(r) * n + c] -= m * A[size_t(k) * n + c];
            b[r] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c)
            s -= A[size_t(r) * n + c] * x[c];
        x[r] = s / A[size_t(r) * n + r];
    }
    return x;
}

// Closed-form local matrices for constant coefficients (eps, b, c) on an
// hx*hy cell, node order (0,0),(1,0),(1,1),(0,1).  Built from the 1D factors
//   S = (1/h)[[1,-1],[-1,1]]    (stiffness)
//   M = (h/6)[[2,1],[1,2]]      (mass)
//   C = [[-1/2,1/2],[-1/2,1/2]] (C[i][j] = int phi_i phi_j' dx)
// so that entry[test][trial] = eps*(Sx My + Mx Sy) - b*(Cx My) + c*(Mx My).
inline std::array<std::array<double, 4>, 4> element_matrix(double hx, double hy, double eps,
                                                           double b, double c) {
    const int nx[4] = {0, 1, 1, 0}, ny[4] = {0, 0, 1, 1};
    const double Sx[2][2] = {{1 / hx, -1 / hx}, {-1 / hx, 1 / hx}};
    const double Sy[2][2] = {{1 / hy, -1 / hy}, {-1 / hy, 1 / hy}};
    const double Mx[2][2] = {{hx / 3, hx / 6}, {hx / 6, hx / 3}};
    const double My[2][2] = {{hy / 3, hy / 6}, {hy / 6, hy / 3}};
    const double Cx[2][2] = {{-0.5, 0.5}, {-0.5, 0.5}};
    std::array<std::array<double, 4>, 4> A{};
    for (int t = 0; t < 4; ++t)
        for (int u = 0; u < 4; ++u) {
            const int a1 = nx[t], a2 = ny[t], b1 = nx[u], b2 = ny[u];
            A[t][u] = eps * (Sx[a1][b1] * My[a2][b2] + Mx[a1][b1] * Sy[a2][b2]) -
                      b * Cx[a1][b1] * My[a2][b2] + c * Mx[a1][b1] * My[a2][b2];
        }
    return A;
}

// int f*phi_t over the cell for constant f: f*hx*hy/4 at every node.
inline std::array<double, 4> element_load(double hx, double hy, double f) {
    return {f * hx * hy / 4, f * hx * hy / 4, f * hx * hy / 4, f * hx * hy / 4};
}

// Hardcoded Gauss-Legendre data on [0,1] (nodes ascending, weights sum 1).
inline constexpr std::array<double, 2> kGauss2Pts{0.21132486540518713, 0.78867513459481290};
inline constexpr std::array<double, 2> kGauss2Wts{0.5, 0.5};
inline constexpr std::array<double, 5> kGauss5Pts{
    0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155, 0.95308992296933200};
inline constexpr std::array<double, 5> kGauss5Wts{
    0.11846344252809454, 0.23931433524968324, 0.28444444444444444, 0.23931433524968324,
    0.11846344252809454};

// Tensor Gauss-5 integral of g over [x0,x0+hx]*[y0,y0+hy].
inline double integrate_cell(const std::function<double(double, double)>& g, double x0,
                             double y0, double hx, double hy) {
    double s = 0.0;
    for (int qx = 0; qx < 5; ++qx)
        for (int qy = 0; qy < 5; ++qy)
            s += kGauss5Wts[qx] * kGauss5Wts[qy] *
                 g(x0 + kGauss5Pts[qx] * hx, y0 + kGauss5Pts[qy] * hy);
    return s * hx * hy;
}

// Central difference with one Richardson step: O(h^4) for smooth g.
inline double fd1(const std::function<double(double)>& g, double x, double h) {
    auto d = [&](double hh) { return (g(x + hh) - g(x - hh)) / (2 * hh); };
    return (4 * d(h / 2) - d(h)) / 3;
}

// Same engine->double mapping the library uses; keeps random streams portable.
inline double urand(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }
inline double usym(std::mt19937_64& gen) { return 2.0 * urand(gen) - 1.0; }

// Uniform unit-square tensor mesh, bypassing the graded builder.
inline bakhfem::TensorMesh2D unit_uniform_mesh(int N) {
    bakhfem::TensorMesh2D m;
    m.N = N;
    m.epsilon = 1.0 / N;
    m.sigma = 1.0;
    m.beta = 1.0;
    m.x.resize(N + 1);
    m.y.resize(N + 1);
    for (int i = 0; i <= N; ++i)
        m.x[i] = m.y[i] = double(i) / N;
    m.hx.assign(N, 1.0 / N);
    m.hy.assign(N, 1.0 / N);
    m.H = m.h = 1.0 / N;
    return m;
}

// Polynomial field sum c[p][q] x^p y^q with exact mixed partials.
inline bakhfem::ScalarField2D cubic_field(const std::array<std::array<double, 4>, 4>& c) {
    return {[c](int m, int n, double x, double y) {
        double s = 0.0;
        for (int p = m; p < 4; ++p)
            for (int q = n; q < 4; ++q) {
                double t = c[p][q];
                for (int k = 0; k < m; ++k)
                    t *= double(p - k);
                for (int k = 0; k < n; ++k)
                    t *= double(q - k);
                s += t * std::pow(x, p - m) * std::pow(y, q - n);
            }
        return s;
    }};
}

} // namespace oracle
