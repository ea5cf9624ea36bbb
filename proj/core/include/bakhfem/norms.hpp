#pragma once

#include "bakhfem/fe_function.hpp"
#include "bakhfem/fields.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bakhfem {

struct NormTriple {
    double l2 = 0;
    double h1_semi = 0;
    double energy = 0; // sqrt(eps*h1_semi^2 + l2^2)
};

// Optional cell restriction for subdomain norms; return true to include
// cell (i, j).
using CellFilter = std::function<bool(int, int)>;

// Norms of a - b for two FE functions on the same mesh.  A 2-point tensor
// Gauss rule integrates the bilinear difference and its gradient exactly;
// higher orders only change roundoff.  Throws invalid_config on mesh
// mismatch or order < 2.
NormTriple norm_fe_difference(const FEFunction& a, const FEFunction& b, double eps,
                              int order = 2, const CellFilter& filter = nullptr);

// Norms of w - v for a smooth callable w (value + first partials used).
// The default 5-point rule is accurate on layer-resolving meshes; order 7
// serves as the audit rule.
NormTriple norm_callable_vs_fe(const ScalarField2D& w, const FEFunction& v, double eps,
                               int order = 5, const CellFilter& filter = nullptr);

// One row of a convergence study.
struct ErrorRecord {
    double epsilon = 0;
    int N = 0;
    double err_energy_uI_uN = 0;   // ||u^I - u^N||_eps
    double rate_energy = 0;        // log2 ratio to the next-finer row; NaN on the last
    double err_superclose = 0;     // ||Pi u - u^N||_eps
    double rate_superclose = 0;
    double err_l2 = 0;             // ||u - u^N||_0
    double rate_l2 = 0;
    double err_interp_l2 = 0;      // ||u - u^I||_0 (not part of the CSV)
    double wall_ms = 0;
    bool solved = true;
    std::string note;
};

struct ConvergenceReport {
    std::vector<ErrorRecord> records; // grouped by epsilon, N ascending
};

// Fills the rate fields from consecutive records of the same epsilon.
// Rates are defined only for N doubling row to row; other spacings throw.
void compute_rates(ConvergenceReport& report);

// log2-log2 least-squares slope of err vs N (sign such that err ~ N^-slope
// gives +slope).  Requires >= 2 points with positive errors.
double fit_log2_slope(const std::vector<int>& Ns, const std::vector<double>& errs);

// Fixed-header CSV:
// epsilon,N,err_energy_uI_uN,rate,err_superclose_Piu_uN,rate,err_L2,wall_ms
// Floats in scientific notation with 6 significant digits; undefined rates
// (the last N of a group) are left empty.
void write_error_csv(const ConvergenceReport& report, std::ostream& os);

} // namespace bakhfem
