#include "bakhfem/assemble.hpp"

#include "bakhfem/errors.hpp"

namespace bakhfem {

LocalSystem local_element_system(double x0, double y0, double hx, double hy, double eps,
                                 const CoefficientSet& cs, const QuadratureRule& rule,
                                 bool with_load) {
    LocalSystem loc;
    const auto& q = rule.line;
    const double jac = hx * hy;
    for (int qy = 0; qy < q.n; ++qy) {
        for (int qx = 0; qx < q.n; ++qx) {
            const double xi = q.pts[qx], eta = q.pts[qy];
            const double w = q.wts[qx] * q.wts[qy] * jac;
            const double x = x0 + xi * hx, y = y0 + eta * hy;
            const auto bas = reference_basis(xi, eta);
            const double bv = cs.b(x, y), cv = cs.c(x, y);
            const double fv = with_load ? cs.f(x, y) : 0.0;
            std::array<double, 4> gx, gy;
            for (int a = 0; a < 4; ++a) {
                gx[a] = bas.dxi[a] / hx;
                gy[a] = bas.deta[a] / hy;
            }
            for (int a = 0; a < 4; ++a) { // test
                for (int t = 0; t < 4; ++t) { // trial
                    loc.A[a][t] += w * (eps * (gx[t] * gx[a] + gy[t] * gy[a]) -
                                        bv * gx[t] * bas.val[a] + cv * bas.val[t] * bas.val[a]);
                }
                if (with_load)
                    loc.F[a] += w * fv * bas.val[a];
            }
        }
    }
    return loc;
}

namespace {

// CSR pattern of the 9-point nodal stencil on the interior grid.
SparseMatrixCSR make_pattern(int N) {
    SparseMatrixCSR A;
    const int n1 = N - 1;
    A.n = n1 * n1;
    A.row_ptr.reserve(A.n + 1);
    A.row_ptr.push_back(0);
    for (int j = 1; j < N; ++j) {
        for (int i = 1; i < N; ++i) {
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (ii >= 1 && ii < N && jj >= 1 && jj < N)
                        A.col_idx.push_back((ii - 1) + (jj - 1) * n1);
                }
            }
            A.row_ptr.push_back(int(A.col_idx.size()));
        }
    }
    A.vals.assign(A.col_idx.size(), 0.0);
    return A;
}

} // namespace

AssembledSystem assemble(const TensorMesh2D& mesh, double eps, const CoefficientSet& cs,
                         const QuadratureRule& rule) {
    if (rule.order < 2)
        throw invalid_config("assemble: quadrature order must be >= 2");
    const int N = mesh.N;
    const int n1 = N - 1;
    AssembledSystem sys;
    sys.A = make_pattern(N);
    sys.F.assign(size_t(n1) * n1, 0.0);

    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const auto loc = local_element_system(mesh.x[i], mesh.y[j], mesh.hx[i],
                                                  mesh.hy[j], eps, cs, rule);
            for (int a = 0; a < 4; ++a) {
                const int ia = i + kLocalNodes[a].first, ja = j + kLocalNodes[a].second;
                if (ia < 1 || ia >= N || ja < 1 || ja >= N)
                    continue; // Dirichlet test function
                const int row = (ia - 1) + (ja - 1) * n1;
                for (int t = 0; t < 4; ++t) {
                    const int it = i + kLocalNodes[t].first, jt = j + kLocalNodes[t].second;
                    if (it < 1 || it >= N || jt < 1 || jt >= N)
                        continue; // Dirichlet trial fixed to zero
                    sys.A.at(row, (it - 1) + (jt - 1) * n1) += loc.A[a][t];
                }
                sys.F[row] += loc.F[a];
            }
        }
    }
    return sys;
}

} // namespace bakhfem
