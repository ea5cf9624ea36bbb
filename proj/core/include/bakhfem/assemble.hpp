#pragma once

#include "bakhfem/fe_function.hpp"
#include "bakhfem/mesh.hpp"
#include "bakhfem/problem.hpp"
#include "bakhfem/quadrature.hpp"
#include "bakhfem/sparse.hpp"

#include <array>
#include <vector>

namespace bakhfem {

// Element contributions of the form  a(w, v) = eps*(grad w, grad v)
// + (-b*w_x, v) + (c*w, v)  on one cell; A[test][trial], F[test].
struct LocalSystem {
    std::array<std::array<double, 4>, 4> A{};
    std::array<double, 4> F{};
};

LocalSystem local_element_system(double x0, double y0, double hx, double hy, double eps,
                                 const CoefficientSet& cs, const QuadratureRule& rule,
                                 bool with_load = true);

struct AssembledSystem {
    SparseMatrixCSR A;        // (N-1)^2 unknowns, row k = (i-1) + (j-1)*(N-1)
    std::vector<double> F;
};

// Galerkin system of the bilinear discretization with homogeneous Dirichlet
// rows/columns eliminated.  Cells are visited in a fixed j-outer order, so
// repeated assembly is bitwise identical.  Throws invalid_config when the
// quadrature order is below 2 (the mass/stiffness products would be
// under-integrated).
AssembledSystem assemble(const TensorMesh2D& mesh, double eps, const CoefficientSet& cs,
                         const QuadratureRule& rule);

} // namespace bakhfem
