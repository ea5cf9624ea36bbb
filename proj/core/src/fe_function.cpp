#include "bakhfem/fe_function.hpp"

#include "bakhfem/errors.hpp"

namespace bakhfem {

BasisEval reference_basis(double xi, double eta) {
    BasisEval e;
    e.val = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
    e.dxi = {-(1 - eta), (1 - eta), eta, -eta};
    e.deta = {-(1 - xi), -xi, xi, (1 - xi)};
    return e;
}

FEFunction::FEFunction(TensorMesh2D mesh)
    : mesh_(std::move(mesh)), vals_(size_t(mesh_.N + 1) * (mesh_.N + 1), 0.0) {}

FEFunction FEFunction::from_callable(TensorMesh2D mesh,
                                     const std::function<double(double, double)>& w) {
    FEFunction f(std::move(mesh));
    const auto& m = f.mesh_;
    for (int j = 0; j <= m.N; ++j)
        for (int i = 0; i <= m.N; ++i)
            f.coeff(i, j) = w(m.x[i], m.y[j]);
    return f;
}

FEFunction FEFunction::from_interior(TensorMesh2D mesh, const std::vector<double>& w) {
    FEFunction f(std::move(mesh));
    const int N = f.mesh_.N;
    if (w.size() != size_t(N - 1) * (N - 1))
        throw invalid_config("from_interior: coefficient vector has wrong size");
    for (int j = 1; j < N; ++j)
        for (int i = 1; i < N; ++i)
            f.coeff(i, j) = w[size_t(j - 1) * (N - 1) + (i - 1)];
    return f;
}

std::array<double, 4> FEFunction::cell_corners(int i, int j) const {
    return {coeff(i, j), coeff(i + 1, j), coeff(i + 1, j + 1), coeff(i, j + 1)};
}

double FEFunction::value_on_cell(int i, int j, double xi, double eta) const {
    const auto c = cell_corners(i, j);
    const auto b = reference_basis(xi, eta);
    return c[0] * b.val[0] + c[1] * b.val[1] + c[2] * b.val[2] + c[3] * b.val[3];
}

double FEFunction::value(double x, double y) const {
    const int i = mesh_.locate_x(x), j = mesh_.locate_y(y);
    const double xi = (x - mesh_.x[i]) / mesh_.hx[i];
    const double eta = (y - mesh_.y[j]) / mesh_.hy[j];
    return value_on_cell(i, j, xi, eta);
}

std::array<double, 2> FEFunction::gradient(double x, double y) const {
    const int i = mesh_.locate_x(x), j = mesh_.locate_y(y);
    const double xi = (x - mesh_.x[i]) / mesh_.hx[i];
    const double eta = (y - mesh_.y[j]) / mesh_.hy[j];
    const auto c = cell_corners(i, j);
    const auto b = reference_basis(xi, eta);
    double gx = 0, gy = 0;
    for (int q = 0; q < 4; ++q) {
        gx += c[q] * b.dxi[q];
        gy += c[q] * b.deta[q];
    }
    return {gx / mesh_.hx[i], gy / mesh_.hy[j]};
}

FEFunction& FEFunction::operator+=(const FEFunction& o) {
    if (!same_mesh(*this, o))
        throw invalid_config("FEFunction: operands live on different meshes");
    for (size_t k = 0; k < vals_.size(); ++k)
        vals_[k] += o.vals_[k];
    return *this;
}

FEFunction& FEFunction::operator-=(const FEFunction& o) {
    if (!same_mesh(*this, o))
        throw invalid_config("FEFunction: operands live on different meshes");
    for (size_t k = 0; k < vals_.size(); ++k)
        vals_[k] -= o.vals_[k];
    return *this;
}

bool same_mesh(const FEFunction& a, const FEFunction& b) {
    return a.mesh().N == b.mesh().N && a.mesh().x == b.mesh().x && a.mesh().y == b.mesh().y;
}

} // namespace bakhfem
