#include "bakhfem/interpolation.hpp"

#include "bakhfem/errors.hpp"
#include "bakhfem/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace bakhfem {

FEFunction lagrange_interpolate(const std::function<double(double, double)>& w,
                                const TensorMesh2D& mesh) {
    return FEFunction::from_callable(mesh, w);
}

CorrectionSystem build_tau(const ScalarField2D& S, const TensorMesh2D& mesh,
                           const QuadratureRule& rule) {
    const int N = mesh.N;
    const int i0 = N / 2 - 1; // strip column
    const double hx = mesh.hx[i0];
    const double h = mesh.h;
    const double H = mesh.H;
    const double xr = mesh.x[i0 + 1]; // = x_{N/2}
    const auto& q = rule.line;

    CorrectionSystem sys;
    sys.N = N;
    sys.tau.resize(sys.size());

    for (int j = sys.j_first(); j <= sys.j_last(); ++j) {
        // Line moment of S_xx along x = x_{N/2} against the 1D hat at y_j.
        double line = 0.0;
        for (int half = 0; half < 2; ++half) {
            const double ya = mesh.y[j - 1 + half];
            for (int k = 0; k < q.n; ++k) {
                const double y = ya + q.pts[k] * h;
                const double hat = half == 0 ? q.pts[k] : 1.0 - q.pts[k];
                line += q.wts[k] * h * S.deriv(2, 0, xr, y) * hat;
            }
        }
        const double l1 = (H * H / 12.0) * line / h;

        // Volume moment of (S - S^I)_x against theta_{N/2, j} over the two
        // strip cells below/above y_j.
        double vol = 0.0;
        for (int half = 0; half < 2; ++half) {
            const int jc = j - 1 + half; // cell row
            const double ya = mesh.y[jc];
            const std::array<double, 4> c{
                S(mesh.x[i0], ya), S(xr, ya), S(xr, mesh.y[jc + 1]),
                S(mesh.x[i0], mesh.y[jc + 1])};
            for (int qy = 0; qy < q.n; ++qy) {
                const double eta = q.pts[qy];
                const double y = ya + eta * h;
                const double interp_dx = ((c[1] - c[0]) * (1.0 - eta) + (c[2] - c[3]) * eta) / hx;
                const double hat = half == 0 ? eta : 1.0 - eta;
                for (int qx = 0; qx < q.n; ++qx) {
                    const double xi = q.pts[qx];
                    const double x = mesh.x[i0] + xi * hx;
                    const double wq = q.wts[qx] * q.wts[qy] * hx * h;
                    vol += wq * (S.deriv(1, 0, x, y) - interp_dx) * xi * hat;
                }
            }
        }
        const double l2 = vol / h;

        // Scaled so the Thomas solve of D*beta = -tau realizes the moment
        // identity: the hat-pair mass against the strip basis contributes
        // the factor h/12 * (1, 4, 1).
        sys.tau[j - sys.j_first()] = -12.0 * (l1 + l2);
    }
    return sys;
}

void solve_correction(CorrectionSystem& sys) {
    const int n = sys.size();
    if (int(sys.tau.size()) != n)
        throw invalid_config("solve_correction: tau has wrong size");
    std::vector<double> lower(n - 1, 1.0), diag(n, 4.0), upper(n - 1, 1.0), rhs(n);
    for (int k = 0; k < n; ++k)
        rhs[k] = -sys.tau[k];
    sys.beta = solve_tridiagonal(lower, diag, upper, rhs);
}

FEFunction build_PiS(const ScalarField2D& S, const TensorMesh2D& mesh,
                     const QuadratureRule& rule) {
    auto sys = build_tau(S, mesh, rule);
    solve_correction(sys);
    FEFunction f = FEFunction::from_callable(
        mesh, [&S](double x, double y) { return S(x, y); });
    const int i0 = mesh.N / 2 - 1;
    for (int j = sys.j_first(); j <= sys.j_last(); ++j)
        f.coeff(i0, j) -= sys.beta[j - sys.j_first()];
    return f;
}

FEFunction build_piE1(const std::function<double(double, double)>& E1,
                      const TensorMesh2D& mesh) {
    FEFunction f = FEFunction::from_callable(mesh, E1);
    const int i0 = mesh.N / 2 - 1;
    for (int j = 1; j < mesh.N; ++j)
        f.coeff(i0, j) = 0.0;
    return f;
}

InterpolantBundle build_Piu(const ManufacturedSolution& ms, const TensorMesh2D& mesh,
                            const QuadratureRule& rule) {
    InterpolantBundle b{
        .uI = lagrange_interpolate([&ms](double x, double y) { return ms.u(x, y); }, mesh),
        .PiS = FEFunction(mesh),
        .piE1 = build_piE1([&ms](double x, double y) { return ms.E1(x, y); }, mesh),
        .E2I = lagrange_interpolate([&ms](double x, double y) { return ms.E2(x, y); }, mesh),
        .E12I = lagrange_interpolate([&ms](double x, double y) { return ms.E12(x, y); }, mesh),
        .Piu = FEFunction(mesh),
        .correction = {}};
    b.correction = build_tau(ms.S.field(), mesh, rule);
    solve_correction(b.correction);
    b.PiS = FEFunction::from_callable(mesh, [&ms](double x, double y) { return ms.S(x, y); });
    const int i0 = mesh.N / 2 - 1;
    for (int j = b.correction.j_first(); j <= b.correction.j_last(); ++j)
        b.PiS.coeff(i0, j) -= b.correction.beta[j - b.correction.j_first()];
    b.Piu = b.PiS;
    b.Piu += b.piE1;
    b.Piu += b.E2I;
    b.Piu += b.E12I;
    return b;
}

IdentityResidual verify_integral_identity(const ScalarField2D& w,
                                          const std::array<double, 4>& v, const CellRect& cell,
                                          int order) {
    const double hx = cell.x1 - cell.x0, hy = cell.y1 - cell.y0;
    if (!(hx > 0.0) || !(hy > 0.0))
        throw invalid_config("verify_integral_identity: degenerate cell");
    const double xc = 0.5 * (cell.x0 + cell.x1), yc = 0.5 * (cell.y0 + cell.y1);
    const double hk = 0.5 * hx, hbk = 0.5 * hy;
    const GaussLegendre1D q(order);

    const std::array<double, 4> wc{w(cell.x0, cell.y0), w(cell.x1, cell.y0),
                                   w(cell.x1, cell.y1), w(cell.x0, cell.y1)};
    const double vxy = (v[0] - v[1] + v[2] - v[3]) / (hx * hy);

    double lhs_x = 0, rhs_x = 0, lhs_y = 0, rhs_y = 0;
    double mag_x = 0, mag_y = 0;
    for (int qy = 0; qy < q.n; ++qy) {
        const double eta = q.pts[qy];
        const double y = cell.y0 + eta * hy;
        for (int qx = 0; qx < q.n; ++qx) {
            const double xi = q.pts[qx];
            const double x = cell.x0 + xi * hx;
            const double wq = q.wts[qx] * q.wts[qy] * hx * hy;

            const double vx = ((v[1] - v[0]) * (1.0 - eta) + (v[2] - v[3]) * eta) / hx;
            const double vy = ((v[3] - v[0]) * (1.0 - xi) + (v[2] - v[1]) * xi) / hy;
            const double wIx = ((wc[1] - wc[0]) * (1.0 - eta) + (wc[2] - wc[3]) * eta) / hx;
            const double wIy = ((wc[3] - wc[0]) * (1.0 - xi) + (wc[2] - wc[1]) * xi) / hy;

            const double F = 0.5 * ((y - yc) * (y - yc) - hbk * hbk);
            const double E = 0.5 * ((x - xc) * (x - xc) - hk * hk);
            const double ix = (w.deriv(1, 0, x, y) - wIx) * vx;
            const double iy = (w.deriv(0, 1, x, y) - wIy) * vy;
            const double jx = w.deriv(1, 2, x, y) * F * (vx - (2.0 / 3.0) * (y - yc) * vxy);
            const double jy = w.deriv(2, 1, x, y) * E * (vy - (2.0 / 3.0) * (x - xc) * vxy);

            lhs_x += wq * ix;
            lhs_y += wq * iy;
            rhs_x += wq * jx;
            rhs_y += wq * jy;
            mag_x += wq * (std::abs(ix) + std::abs(jx));
            mag_y += wq * (std::abs(iy) + std::abs(jy));
        }
    }
    IdentityResidual r;
    r.res_x = std::abs(lhs_x - rhs_x);
    r.res_y = std::abs(lhs_y - rhs_y);
    r.scale_x = mag_x;
    r.scale_y = mag_y;
    return r;
}

IdentityResidual verify_integral_identity(const ScalarField2D& w, const FEFunction& v, int i,
                                          int j, int order) {
    const auto& m = v.mesh();
    if (i < 0 || i >= m.N || j < 0 || j >= m.N)
        throw std::out_of_range("verify_integral_identity: cell index out of range");
    return verify_integral_identity(
        w, v.cell_corners(i, j),
        CellRect{m.x[i], m.x[i + 1], m.y[j], m.y[j + 1]}, order);
}

void dump_correction_csv(const CorrectionSystem& sys, std::ostream& os) {
    os << "j,tau,beta\n";
    char buf[64];
    for (int k = 0; k < sys.size(); ++k) {
        os << (sys.j_first() + k) << ',';
        std::snprintf(buf, sizeof buf, "%.17E", sys.tau[k]);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17E", sys.beta.empty() ? 0.0 : sys.beta[k]);
        os << buf << '\n';
    }
}

} // namespace bakhfem
