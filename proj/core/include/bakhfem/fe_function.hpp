#pragma once

#include "bakhfem/mesh.hpp"

#include <array>
#include <functional>
#include <vector>

namespace bakhfem {

// Values and reference-square gradients of the four bilinear shape functions
// at (xi, eta) in [0,1]^2.  Local node order: 0:(0,0), 1:(1,0), 2:(1,1),
// 3:(0,1), counter-clockwise from the lower-left corner.
struct BasisEval {
    std::array<double, 4> val, dxi, deta;
};
BasisEval reference_basis(double xi, double eta);

// Local (xi, eta) offsets of the four nodes, same order as reference_basis.
inline constexpr std::array<std::pair<int, int>, 4> kLocalNodes{
    {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};

// Continuous piecewise-bilinear function on a tensor mesh, stored as nodal
// values on the full (N+1)^2 grid (boundary included).  The mesh is held by
// value: it is a few KB and this removes all lifetime coupling.
class FEFunction {
  public:
    FEFunction() = default;
    explicit FEFunction(TensorMesh2D mesh);

    // Nodal interpolant of a callable.
    static FEFunction from_callable(TensorMesh2D mesh,
                                    const std::function<double(double, double)>& w);
    // Zero boundary + row-major interior coefficients w_k, k = (i-1) + (j-1)*(N-1).
    static FEFunction from_interior(TensorMesh2D mesh, const std::vector<double>& w);

    const TensorMesh2D& mesh() const { return mesh_; }
    int N() const { return mesh_.N; }

    double& coeff(int i, int j) { return vals_[size_t(j) * (mesh_.N + 1) + i]; }
    double coeff(int i, int j) const { return vals_[size_t(j) * (mesh_.N + 1) + i]; }

    // Corner values of cell (i, j) in local node order.
    std::array<double, 4> cell_corners(int i, int j) const;

    // Point evaluation; (x, y) must lie in [0,1]^2.
    double value(double x, double y) const;
    // Gradient; on cell edges the cell owning the point per locate_* wins.
    std::array<double, 2> gradient(double x, double y) const;
    // Evaluation restricted to a known cell (no lookup); xi/eta in [0,1].
    double value_on_cell(int i, int j, double xi, double eta) const;

    FEFunction& operator+=(const FEFunction& o);
    FEFunction& operator-=(const FEFunction& o);

    const std::vector<double>& raw() const { return vals_; }

  private:
    TensorMesh2D mesh_;
    std::vector<double> vals_; // (N+1)^2 nodal values
};

// True when both functions live on bitwise-identical meshes (same N, nodes).
bool same_mesh(const FEFunction& a, const FEFunction& b);

} // namespace bakhfem
