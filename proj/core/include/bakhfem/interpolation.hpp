#pragma once

#include "bakhfem/fe_function.hpp"
#include "bakhfem/fields.hpp"
#include "bakhfem/mesh.hpp"
#include "bakhfem/problem.hpp"
#include "bakhfem/quadrature.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace bakhfem {

// Nodal (Lagrange) bilinear interpolant of a callable.
FEFunction lagrange_interpolate(const std::function<double(double, double)>& w,
                                const TensorMesh2D& mesh);

// Tridiagonal correction system for the modified smooth-part interpolant.
// Unknowns are the nodal corrections beta_j at the column x_{N/2-1},
// j = N/4+1 .. 3N/4-1, coupled by D = tridiag(1, 4, 1):  D*beta = -tau.
struct CorrectionSystem {
    int N = 0;
    std::vector<double> tau;  // right-hand side data, index 0 <-> j = N/4+1
    std::vector<double> beta; // filled by solve_correction

    int j_first() const { return N / 4 + 1; }
    int j_last() const { return 3 * N / 4 - 1; }
    int size() const { return N / 2 - 1; }
};

// Assembles tau from the smooth part S.  Each entry combines the coarse-side
// line moment of S_xx along x = x_{N/2} (weighted H^2/12) with the volume
// moment of (S - S^I)_x against the hat of the node (x_{N/2}, y_j) over the
// two strip cells, scaled so that solving D*beta = -tau makes the corrected
// interpolant satisfy the defining moment identity
//   int (S - PiS)_x theta_{N/2,j} = -(H^2/12) int S_xx(x_{N/2}, .) theta_{N/2,j}
// over the cell pair.  The rule's order is used per direction (line and
// cells); order 6 integrates the smooth factors to roundoff.
CorrectionSystem build_tau(const ScalarField2D& S, const TensorMesh2D& mesh,
                           const QuadratureRule& rule);

// Thomas elimination of the diagonally dominant system D*beta = -tau.
// Guarantees ||beta||_inf <= ||tau||_inf / 2.
void solve_correction(CorrectionSystem& sys);

// Modified smooth-part interpolant: nodal values of S everywhere except the
// column x_{N/2-1}, where S(x_{N/2-1}, y_j) - beta_j is used for interior
// strip indices j = N/4+1 .. 3N/4-1.
FEFunction build_PiS(const ScalarField2D& S, const TensorMesh2D& mesh,
                     const QuadratureRule& rule);

// Boundary-corrected layer interpolant: nodal values of E1 everywhere except
// the column x_{N/2-1}, which is zeroed at interior j (the two boundary rows
// keep E1 so the full interpolant vanishes on the boundary).
FEFunction build_piE1(const std::function<double(double, double)>& E1,
                      const TensorMesh2D& mesh);

struct InterpolantBundle {
    FEFunction uI;    // plain nodal interpolant of u
    FEFunction PiS;   // corrected smooth part
    FEFunction piE1;  // column-corrected x layer
    FEFunction E2I;   // nodal interpolant of the y layer
    FEFunction E12I;  // nodal interpolant of the corner layer
    FEFunction Piu;   // PiS + piE1 + E2I + E12I
    CorrectionSystem correction;
};

// Assembles the full modified interpolant of the decomposed solution.
InterpolantBundle build_Piu(const ManufacturedSolution& ms, const TensorMesh2D& mesh,
                            const QuadratureRule& rule);

struct CellRect {
    double x0, x1, y0, y1;
};

struct IdentityResidual {
    double res_x = 0, res_y = 0; // |LHS - RHS| of the two identities
    // Integrals of the absolute integrands of both sides: res/scale is a
    // conditioning-aware relative residual (scale == 0 forces res == 0, both
    // integrands being identically zero).
    double scale_x = 0, scale_y = 0;
};

// Checks the Lin-type cell identities relating interpolation-error gradients
// to third derivatives: with (xc, yc) the cell center, hK/hbarK the half
// widths, F(y) = ((y-yc)^2 - hbarK^2)/2 and E(x) = ((x-xc)^2 - hK^2)/2,
//   int (w - w^I)_x v_x = int w_xyy F(y) (v_x - (2/3)(y-yc) v_xy)
//   int (w - w^I)_y v_y = int w_xxy E(x) (v_y - (2/3)(x-xc) v_xy)
// for every bilinear v (given by its corner values).  Both sides are
// evaluated with an `order`-point tensor rule.
IdentityResidual verify_integral_identity(const ScalarField2D& w,
                                          const std::array<double, 4>& v_corners,
                                          const CellRect& cell, int order = 10);
// Same, with v and the cell taken from an FE function.
IdentityResidual verify_integral_identity(const ScalarField2D& w, const FEFunction& v,
                                          int i, int j, int order = 10);

// CSV dump of the correction data, columns j,tau,beta (17 significant digits).
void dump_correction_csv(const CorrectionSystem& sys, std::ostream& os);

} // namespace bakhfem
