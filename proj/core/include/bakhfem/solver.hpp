#pragma once

#include "bakhfem/sparse.hpp"

#include <vector>

namespace bakhfem {

struct SolveOptions {
    double tol = 1e-12;        // relative residual target, ||b - Ax|| <= tol*||b||
    int max_iterations = 4000;
    // Direct banded elimination is used when the Krylov iteration fails and
    // the system is small enough for the band to fit comfortably in memory.
    int direct_fallback_max_n = 16384;
};

struct SolveResult {
    std::vector<double> x;
    double residual = 0; // final true residual norm ||b - Ax||
    int iterations = 0;
    bool used_direct = false;
};

// Solves A x = b for the nonsymmetric Galerkin matrix: ILU(0)-preconditioned
// BiCGStab, with a banded LU fallback.  ||b|| = 0 returns x = 0 immediately;
// otherwise the target is tol*||b|| with a tiny absolute floor so ill-scaled
// right-hand sides terminate.  Throws solver_failure when neither path
// reaches the target.
SolveResult solve(const SparseMatrixCSR& A, const std::vector<double>& b,
                  const SolveOptions& opts = {});

// Tridiagonal elimination (Thomas algorithm) for diagonally dominant systems:
// lower/upper have size n-1.  Returns the solution.
std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      const std::vector<double>& rhs);

} // namespace bakhfem
