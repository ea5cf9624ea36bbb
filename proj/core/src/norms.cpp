#include "bakhfem/norms.hpp"

#include "bakhfem/errors.hpp"
#include "bakhfem/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace bakhfem {

NormTriple norm_fe_difference(const FEFunction& a, const FEFunction& b, double eps,
                              int order, const CellFilter& filter) {
    if (!same_mesh(a, b))
        throw invalid_config("norm_fe_difference: functions live on different meshes");
    if (order < 2)
        throw invalid_config("norm_fe_difference: order must be >= 2");
    const auto& m = a.mesh();
    const GaussLegendre1D q(order);
    double l2 = 0, h1 = 0;
    for (int j = 0; j < m.N; ++j) {
        for (int i = 0; i < m.N; ++i) {
            if (filter && !filter(i, j))
                continue;
            const auto ca = a.cell_corners(i, j);
            const auto cb = b.cell_corners(i, j);
            const std::array<double, 4> d{ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2],
                                          ca[3] - cb[3]};
            const double jac = m.hx[i] * m.hy[j];
            for (int qy = 0; qy < q.n; ++qy) {
                for (int qx = 0; qx < q.n; ++qx) {
                    const auto bas = reference_basis(q.pts[qx], q.pts[qy]);
                    double v = 0, gx = 0, gy = 0;
                    for (int t = 0; t < 4; ++t) {
                        v += d[t] * bas.val[t];
                        gx += d[t] * bas.dxi[t];
                        gy += d[t] * bas.deta[t];
                    }
                    gx /= m.hx[i];
                    gy /= m.hy[j];
                    const double w = q.wts[qx] * q.wts[qy] * jac;
                    l2 += w * v * v;
                    h1 += w * (gx * gx + gy * gy);
                }
            }
        }
    }
    return {std::sqrt(l2), std::sqrt(h1), std::sqrt(eps * h1 + l2)};
}

NormTriple norm_callable_vs_fe(const ScalarField2D& w, const FEFunction& v, double eps,
                               int order, const CellFilter& filter) {
    if (order < 2)
        throw invalid_config("norm_callable_vs_fe: order must be >= 2");
    const auto& m = v.mesh();
    const GaussLegendre1D q(order);
    double l2 = 0, h1 = 0;
    for (int j = 0; j < m.N; ++j) {
        for (int i = 0; i < m.N; ++i) {
            if (filter && !filter(i, j))
                continue;
            const auto c = v.cell_corners(i, j);
            const double jac = m.hx[i] * m.hy[j];
            for (int qy = 0; qy < q.n; ++qy) {
                for (int qx = 0; qx < q.n; ++qx) {
                    const double xi = q.pts[qx], eta = q.pts[qy];
                    const double x = m.x[i] + xi * m.hx[i], y = m.y[j] + eta * m.hy[j];
                    const auto bas = reference_basis(xi, eta);
                    double fv = 0, fgx = 0, fgy = 0;
                    for (int t = 0; t < 4; ++t) {
                        fv += c[t] * bas.val[t];
                        fgx += c[t] * bas.dxi[t];
                        fgy += c[t] * bas.deta[t];
                    }
                    fgx /= m.hx[i];
                    fgy /= m.hy[j];
                    const double dv = w.deriv(0, 0, x, y) - fv;
                    const double dgx = w.deriv(1, 0, x, y) - fgx;
                    const double dgy = w.deriv(0, 1, x, y) - fgy;
                    const double wq = q.wts[qx] * q.wts[qy] * jac;
                    l2 += wq * dv * dv;
                    h1 += wq * (dgx * dgx + dgy * dgy);
                }
            }
        }
    }
    return {std::sqrt(l2), std::sqrt(h1), std::sqrt(eps * h1 + l2)};
}

void compute_rates(ConvergenceReport& report) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto& rs = report.records;
    for (size_t k = 0; k < rs.size(); ++k) {
        rs[k].rate_energy = rs[k].rate_superclose = rs[k].rate_l2 = nan;
        if (k + 1 < rs.size() && rs[k + 1].epsilon == rs[k].epsilon) {
            if (rs[k + 1].N != 2 * rs[k].N)
                throw invalid_config("compute_rates: rates need N doubling row to row");
            if (!rs[k].solved || !rs[k + 1].solved)
                continue;
            rs[k].rate_energy = std::log2(rs[k].err_energy_uI_uN / rs[k + 1].err_energy_uI_uN);
            rs[k].rate_superclose =
                std::log2(rs[k].err_superclose / rs[k + 1].err_superclose);
            rs[k].rate_l2 = std::log2(rs[k].err_l2 / rs[k + 1].err_l2);
        }
    }
}

double fit_log2_slope(const std::vector<int>& Ns, const std::vector<double>& errs) {
    if (Ns.size() != errs.size() || Ns.size() < 2)
        throw invalid_config("fit_log2_slope: need at least two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(Ns.size());
    for (size_t k = 0; k < Ns.size(); ++k) {
        if (!(errs[k] > 0.0))
            throw invalid_config("fit_log2_slope: errors must be positive");
        const double lx = std::log2(double(Ns[k])), ly = std::log2(errs[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

void put(std::ostream& os, double v) {
    if (std::isnan(v))
        return; // undefined rate -> empty field
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5E", v);
    os << buf;
}

} // namespace

void write_error_csv(const ConvergenceReport& report, std::ostream& os) {
    os << "epsilon,N,err_energy_uI_uN,rate,err_superclose_Piu_uN,rate,err_L2,wall_ms\n";
    for (const auto& r : report.records) {
        put(os, r.epsilon);
        os << ',' << r.N << ',';
        put(os, r.err_energy_uI_uN);
        os << ',';
        put(os, r.rate_energy);
        os << ',';
        put(os, r.err_superclose);
        os << ',';
        put(os, r.rate_superclose);
        os << ',';
        put(os, r.err_l2);
        os << ',';
        put(os, r.wall_ms);
        os << '\n';
    }
}

} // namespace bakhfem
