#include "bakhfem/solver.hpp"

#include "bakhfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bakhfem {

namespace {

double nrm2(const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Zero-fill incomplete LU factorization in the CSR pattern of A.
// L has unit diagonal and shares the strictly-lower entries; U the rest.
struct ILU0 {
    explicit ILU0(const SparseMatrixCSR& A) : m(A), diag(A.n, -1) {
        for (int r = 0; r < m.n; ++r) {
            for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
                if (m.col_idx[k] == r)
                    diag[r] = k;
            if (diag[r] < 0 || m.vals[diag[r]] == 0.0)
                throw solver_failure("ILU(0): missing or zero diagonal", 0.0, 0);
        }
        for (int r = 1; r < m.n; ++r) {
            for (int kk = m.row_ptr[r]; kk < m.row_ptr[r + 1] && m.col_idx[kk] < r; ++kk) {
                const int p = m.col_idx[kk];
                const double piv = m.vals[diag[p]];
                if (piv == 0.0)
                    throw solver_failure("ILU(0): zero pivot", 0.0, p);
                const double lrp = (m.vals[kk] /= piv);
                // Subtract lrp * (row p, columns > p) from row r, pattern only.
                int a = kk + 1, b = diag[p] + 1;
                const int aEnd = m.row_ptr[r + 1], bEnd = m.row_ptr[p + 1];
                while (a < aEnd && b < bEnd) {
                    if (m.col_idx[a] == m.col_idx[b]) {
                        m.vals[a] -= lrp * m.vals[b];
                        ++a;
                        ++b;
                    } else if (m.col_idx[a] < m.col_idx[b]) {
                        ++a;
                    } else {
                        ++b;
                    }
                }
            }
        }
    }

    // z = (LU)^{-1} r
    void apply(const std::vector<double>& r, std::vector<double>& z) const {
        z = r;
        for (int i = 0; i < m.n; ++i) {
            double s = z[i];
            for (int k = m.row_ptr[i]; k < diag[i]; ++k)
                s -= m.vals[k] * z[m.col_idx[k]];
            z[i] = s;
        }
        for (int i = m.n - 1; i >= 0; --i) {
            double s = z[i];
            for (int k = diag[i] + 1; k < m.row_ptr[i + 1]; ++k)
                s -= m.vals[k] * z[m.col_idx[k]];
            z[i] = s / m.vals[diag[i]];
        }
    }

    SparseMatrixCSR m;
    std::vector<int> diag;
};

// Unpivoted banded LU; safe here because the Galerkin matrix has a positive
// definite symmetric part, so all leading principal minors are nonsingular.
std::vector<double> banded_solve(const SparseMatrixCSR& A, const std::vector<double>& b) {
    const int n = A.n;
    int p = 0;
    for (int r = 0; r < n; ++r)
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
            p = std::max(p, std::abs(A.col_idx[k] - r));
    const int width = 2 * p + 1;
    std::vector<double> band(size_t(n) * width, 0.0); // entry (r,c) at [r*width + c-r+p]
    for (int r = 0; r < n; ++r)
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
            band[size_t(r) * width + (A.col_idx[k] - r + p)] = A.vals[k];

    std::vector<double> x = b;
    for (int k = 0; k < n; ++k) {
        const double piv = band[size_t(k) * width + p];
        if (piv == 0.0 || !std::isfinite(piv))
            throw solver_failure("banded LU: zero pivot at row " + std::to_string(k), 0.0, k);
        const int iEnd = std::min(n - 1, k + p);
        for (int i = k + 1; i <= iEnd; ++i) {
            double& lik = band[size_t(i) * width + (k - i + p)];
            if (lik == 0.0)
                continue;
            const double l = lik / piv;
            lik = l;
            const int jEnd = std::min(n - 1, k + p);
            for (int j = k + 1; j <= jEnd; ++j)
                band[size_t(i) * width + (j - i + p)] -= l * band[size_t(k) * width + (j - k + p)];
            x[i] -= l * x[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        const int jEnd = std::min(n - 1, i + p);
        double s = x[i];
        for (int j = i + 1; j <= jEnd; ++j)
            s -= band[size_t(i) * width + (j - i + p)] * x[j];
        x[i] = s / band[size_t(i) * width + p];
    }
    return x;
}

double true_residual(const SparseMatrixCSR& A, const std::vector<double>& x,
                     const std::vector<double>& b, std::vector<double>& scratch) {
    A.multiply(x, scratch);
    double s = 0.0;
    for (int i = 0; i < A.n; ++i) {
        const double r = b[i] - scratch[i];
        s += r * r;
    }
    return std::sqrt(s);
}

} // namespace

SolveResult solve(const SparseMatrixCSR& A, const std::vector<double>& b,
                  const SolveOptions& opts) {
    if (int(b.size()) != A.n)
        throw invalid_config("solve: right-hand side size mismatch");
    SolveResult res;
    res.x.assign(A.n, 0.0);
    const double nb = nrm2(b);
    if (nb == 0.0)
        return res;
    // Absolute floor keeps the loop terminating for denormal-scale b.
    const double target = std::max(opts.tol * nb, 1e-290);

    // Right-preconditioned BiCGStab with the true residual tracked.
    std::vector<double> scratch(A.n);
    try {
        ILU0 prec(A);
        std::vector<double> r = b, rhat = b, p(A.n, 0.0), v(A.n, 0.0);
        std::vector<double> phat(A.n), s(A.n), shat(A.n), t(A.n);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        double rn = nb;
        for (int it = 1; it <= opts.max_iterations; ++it) {
            const double rho1 = dot(rhat, r);
            if (std::abs(rho1) < 1e-300)
                break; // Lanczos breakdown; fall through to the direct path
            if (it == 1) {
                p = r;
            } else {
                const double beta = (rho1 / rho) * (alpha / omega);
                for (int i = 0; i < A.n; ++i)
                    p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            prec.apply(p, phat);
            A.multiply(phat, v);
            const double rhv = dot(rhat, v);
            if (std::abs(rhv) < 1e-300)
                break;
            alpha = rho1 / rhv;
            for (int i = 0; i < A.n; ++i)
                s[i] = r[i] - alpha * v[i];
            if (nrm2(s) <= target) {
                std::vector<double> xh = res.x;
                for (int i = 0; i < A.n; ++i)
                    xh[i] += alpha * phat[i];
                const double tr = true_residual(A, xh, b, scratch);
                if (tr <= target) {
                    res.x = std::move(xh);
                    res.residual = tr;
                    res.iterations = it;
                    return res;
                }
                // not actually converged: fall through to the full step
            }
            prec.apply(s, shat);
            A.multiply(shat, t);
            const double tt = dot(t, t);
            if (tt == 0.0)
                break;
            omega = dot(t, s) / tt;
            if (omega == 0.0)
                break;
            for (int i = 0; i < A.n; ++i) {
                res.x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
            rn = nrm2(r);
            res.iterations = it;
            if (rn <= target) {
                res.residual = true_residual(A, res.x, b, scratch);
                if (res.residual <= target)
                    return res;
            }
            rho = rho1;
        }
        res.residual = true_residual(A, res.x, b, scratch);
        if (res.residual <= target)
            return res;
    } catch (const solver_failure&) {
        // factorization breakdown: try the direct path below
    }

    if (A.n <= opts.direct_fallback_max_n) {
        res.x = banded_solve(A, b);
        res.used_direct = true;
        res.residual = true_residual(A, res.x, b, scratch);
        if (res.residual <= std::max(target, 1e-10 * nb))
            return res;
    }
    throw solver_failure("linear solver failed to reach tolerance: residual " +
                             std::to_string(res.residual) + " target " + std::to_string(target),
                         res.residual, res.iterations);
}

std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      const std::vector<double>& rhs) {
    const size_t n = diag.size();
    if (n == 0 || lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
        throw invalid_config("solve_tridiagonal: inconsistent sizes");
    std::vector<double> c(n - 1), x(n);
    double d = diag[0];
    if (d == 0.0)
        throw solver_failure("tridiagonal: zero pivot", 0.0, 0);
    x[0] = rhs[0] / d;
    for (size_t i = 1; i < n; ++i) {
        c[i - 1] = upper[i - 1] / d;
        d = diag[i] - lower[i - 1] * c[i - 1];
        if (d == 0.0)
            throw solver_failure("tridiagonal: zero pivot", 0.0, int(i));
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / d;
    }
    for (size_t i = n - 1; i-- > 0;)
        x[i] -= c[i] * x[i + 1];
    return x;
}

} // namespace bakhfem
