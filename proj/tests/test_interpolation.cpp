#include "bakhfem/interpolation.hpp"

#include "bakhfem/errors.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace bakhfem;

namespace {

const TensorMesh2D& study_mesh() {
    static const TensorMesh2D m = build_mesh(MeshConfig{16, 1e-4, 2.5, 1.0});
    return m;
}

// d/dx of the bilinear given by cell corners (order (0,0),(1,0),(1,1),(0,1)).
double corner_dx(const std::array<double, 4>& c, double eta, double hx) {
    return ((c[1] - c[0]) * (1.0 - eta) + (c[2] - c[3]) * eta) / hx;
}

} // namespace

TEST_CASE("nodal interpolation reproduces bilinears exactly") {
    const TensorMesh2D& m = study_mesh();
    auto g = [](double x, double y) { return 2.0 + 3.0 * x - y + 5.0 * x * y; };
    const FEFunction f = lagrange_interpolate(g, m);
    for (int j = 0; j <= m.N; ++j)
        for (int i = 0; i <= m.N; ++i)
            CHECK(f.coeff(i, j) == g(m.x[i], m.y[j]));
    std::mt19937_64 gen(5);
    for (int k = 0; k < 25; ++k) {
        const double x = oracle::urand(gen), y = oracle::urand(gen);
        CHECK(f.value(x, y) == doctest::Approx(g(x, y)).epsilon(1e-13));
    }
}

TEST_CASE("correction data for the quadratic smooth part") {
    // S = x^2: the line moment is 2 per unit hat mass and the volume moment
    // is h*hx^2/6, so every tau entry equals -2*(H^2 + hx^2).
    const TensorMesh2D& m = study_mesh();
    std::array<std::array<double, 4>, 4> c{};
    c[2][0] = 1.0;
    const CorrectionSystem sys = build_tau(oracle::cubic_field(c), m, QuadratureRule(6));
    REQUIRE(sys.size() == m.N / 2 - 1);
    CHECK(sys.j_first() == m.N / 4 + 1);
    CHECK(sys.j_last() == 3 * m.N / 4 - 1);
    const double hx = m.hx[m.N / 2 - 1];
    const double expect = -2.0 * (m.H * m.H + hx * hx);
    for (double t : sys.tau)
        CHECK(t == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("bilinear smooth parts need no correction") {
    const TensorMesh2D& m = study_mesh();
    std::array<std::array<double, 4>, 4> c{};
    c[0][0] = 2.0;
    c[1][0] = 3.0;
    c[0][1] = -1.0;
    c[1][1] = 5.0;
    const CorrectionSystem sys = build_tau(oracle::cubic_field(c), m, QuadratureRule(6));
    for (double t : sys.tau)
        CHECK(std::abs(t) <= 1e-14);
}

TEST_CASE("thomas solve of the correction system") {
    SUBCASE("single unknown") {
        CorrectionSystem sys;
        sys.N = 4;
        sys.tau = {4.0};
        solve_correction(sys);
        REQUIRE(sys.beta.size() == 1);
        CHECK(sys.beta[0] == doctest::Approx(-1.0));
    }
    SUBCASE("bad tau size") {
        CorrectionSystem sys;
        sys.N = 16;
        sys.tau = {1.0, 2.0};
        CHECK_THROWS_AS(solve_correction(sys), invalid_config);
    }
    SUBCASE("random systems match dense elimination and obey the half bound") {
        std::mt19937_64 gen(31);
        for (int n : {3, 15, 127}) {
            CorrectionSystem sys;
            sys.N = 2 * (n + 1); // size() == n
            sys.tau.resize(n);
            for (int rep = 0; rep < 25; ++rep) {
                double tmax = 0.0;
                for (double& t : sys.tau) {
                    t = oracle::usym(gen);
                    tmax = std::max(tmax, std::abs(t));
                }
                solve_correction(sys);

                std::vector<double> dense(size_t(n) * n, 0.0), rhs(n);
                for (int i = 0; i < n; ++i) {
                    dense[size_t(i) * n + i] = 4.0;
                    if (i > 0)
                        dense[size_t(i) * n + i - 1] = 1.0;
                    if (i + 1 < n)
                        dense[size_t(i) * n + i + 1] = 1.0;
                    rhs[i] = -sys.tau[i];
                }
                const auto ref = oracle::dense_solve(dense, rhs);
                double bmax = 0.0;
                for (int i = 0; i < n; ++i) {
                    CHECK(sys.beta[i] ==
                          doctest::Approx(ref[i]).epsilon(1e-12).scale(tmax));
                    bmax = std::max(bmax, std::abs(sys.beta[i]));
                }
                CHECK(bmax <= 0.5 * tmax * (1 + 1e-14));
            }
        }
    }
}

TEST_CASE("corrected smooth interpolant shifts only the strip column") {
    const TensorMesh2D& m = study_mesh();
    const ManufacturedSolution ms = test_problem(1e-4).solution;
    const ScalarField2D S = ms.S.field();
    const FEFunction PiS = build_PiS(S, m, QuadratureRule(6));

    CorrectionSystem sys = build_tau(S, m, QuadratureRule(6));
    solve_correction(sys);
    const int i0 = m.N / 2 - 1;
    for (int j = 0; j <= m.N; ++j)
        for (int i = 0; i <= m.N; ++i) {
            const double nodal = S.deriv(0, 0, m.x[i], m.y[j]);
            if (i == i0 && j >= sys.j_first() && j <= sys.j_last())
                CHECK(PiS.coeff(i, j) ==
                      doctest::Approx(nodal - sys.beta[j - sys.j_first()]).epsilon(1e-14));
            else
                CHECK(PiS.coeff(i, j) == doctest::Approx(nodal).epsilon(1e-15));
        }
}

TEST_CASE("layer interpolant zeroes the interior of the strip column") {
    const TensorMesh2D& m = study_mesh();
    const ManufacturedSolution ms = test_problem(1e-4).solution;
    auto E1 = [&ms](double x, double y) { return ms.E1(x, y); };
    const FEFunction f = build_piE1(E1, m);
    const int i0 = m.N / 2 - 1;
    for (int j = 0; j <= m.N; ++j)
        for (int i = 0; i <= m.N; ++i) {
            if (i == i0 && j > 0 && j < m.N)
                CHECK(f.coeff(i, j) == 0.0);
            else
                CHECK(f.coeff(i, j) == E1(m.x[i], m.y[j]));
        }
}

TEST_CASE("combined interpolant is the sum of its parts") {
    const TensorMesh2D& m = study_mesh();
    const ManufacturedSolution ms = test_problem(1e-4).solution;
    const InterpolantBundle b = build_Piu(ms, m, QuadratureRule(6));
    for (int j = 0; j <= m.N; ++j)
        for (int i = 0; i <= m.N; ++i) {
            CHECK(b.uI.coeff(i, j) == ms.u(m.x[i], m.y[j]));
            const double sum = b.PiS.coeff(i, j) + b.piE1.coeff(i, j) + b.E2I.coeff(i, j) +
                               b.E12I.coeff(i, j);
            CHECK(b.Piu.coeff(i, j) == doctest::Approx(sum).epsilon(1e-15));
        }
    // The correction is constant across the strip for this problem (S has no
    // y variation) and mirror-symmetric.
    const auto& tau = b.correction.tau;
    for (double t : tau)
        CHECK(t == doctest::Approx(tau.front()).epsilon(1e-12));
    const auto& beta = b.correction.beta;
    const int n = int(beta.size());
    for (int k = 0; k < n; ++k)
        CHECK(beta[k] == doctest::Approx(beta[n - 1 - k]).epsilon(1e-12));
}

TEST_CASE("corrected interpolant satisfies its defining moment identity") {
    // Independent quadrature check of
    //   int_(strip cell pair) (S - PiS)_x theta_{N/2,j}
    //     = -(H^2/12) int S_xx(x_{N/2}, y) theta_j(y) dy.
    const TensorMesh2D& m = study_mesh();
    const int N = m.N, i0 = N / 2 - 1;
    const double hx = m.hx[i0], x0 = m.x[i0], xr = m.x[i0 + 1];

    std::array<std::array<double, 4>, 4> cc{};
    cc[0][0] = 2.0;
    cc[2][0] = 1.0;
    cc[3][0] = 0.7;
    cc[2][1] = -0.4;
    cc[1][2] = 0.9;
    cc[0][3] = 0.3;
    const ScalarField2D fields[2] = {test_problem(1e-4).solution.S.field(),
                                     oracle::cubic_field(cc)};
    for (const ScalarField2D& S : fields) {
        const FEFunction PiS = build_PiS(S, m, QuadratureRule(6));
        for (int j : {N / 4 + 1, N / 2, 3 * N / 4 - 1}) {
            double lhs = 0.0;
            for (int half = 0; half < 2; ++half) {
                const int jc = j - 1 + half;
                const auto corners = PiS.cell_corners(i0, jc);
                const double yb = m.y[jc], hy = m.hy[jc];
                lhs += oracle::integrate_cell(
                    [&](double x, double y) {
                        const double eta = (y - yb) / hy;
                        const double xi = (x - x0) / hx;
                        const double hat = half == 0 ? eta : 1.0 - eta;
                        return (S.deriv(1, 0, x, y) - corner_dx(corners, eta, hx)) * xi *
                               hat;
                    },
                    x0, yb, hx, hy);
            }
            double line = 0.0;
            for (int half = 0; half < 2; ++half) {
                const double yb = m.y[j - 1 + half], hy = m.hy[j - 1 + half];
                for (int q = 0; q < 5; ++q) {
                    const double t = oracle::kGauss5Pts[q];
                    const double hat = half == 0 ? t : 1.0 - t;
                    line += oracle::kGauss5Wts[q] * hy * S.deriv(2, 0, xr, yb + t * hy) * hat;
                }
            }
            const double rhs = -(m.H * m.H / 12.0) * line;
            const double scale = std::abs(lhs) + std::abs(rhs);
            REQUIRE(scale > 0.0);
            CHECK(std::abs(lhs - rhs) / scale <= 1e-9);
        }
    }
}

TEST_CASE("cell identities relating interpolation error to third derivatives") {
    std::mt19937_64 gen(77);
    SUBCASE("random cubics on random cells") {
        for (int rep = 0; rep < 20; ++rep) {
            std::array<std::array<double, 4>, 4> c{};
            for (auto& row : c)
                for (double& v : row)
                    v = oracle::usym(gen);
            const double x0 = 0.1 + 0.4 * oracle::urand(gen);
            const double y0 = 0.2 + 0.3 * oracle::urand(gen);
            const CellRect r{x0, x0 + 0.05 + 0.4 * oracle::urand(gen), y0,
                             y0 + 0.05 + 0.4 * oracle::urand(gen)};
            const std::array<double, 4> v{oracle::usym(gen), oracle::usym(gen),
                                          oracle::usym(gen), oracle::usym(gen)};
            const IdentityResidual res =
                verify_integral_identity(oracle::cubic_field(c), v, r);
            CHECK(res.res_x <= 1e-12 * std::max(res.scale_x, 1e-30));
            CHECK(res.res_y <= 1e-12 * std::max(res.scale_y, 1e-30));
        }
    }
    SUBCASE("bilinear w makes both sides vanish") {
        std::array<std::array<double, 4>, 4> c{};
        c[0][0] = 1.0;
        c[1][1] = -2.0;
        const IdentityResidual res = verify_integral_identity(
            oracle::cubic_field(c), {1.0, -0.5, 2.0, 0.25}, CellRect{0.2, 0.5, 0.1, 0.3});
        CHECK(res.scale_x <= 1e-15);
        CHECK(res.scale_y <= 1e-15);
        CHECK(res.res_x <= 1e-15);
        CHECK(res.res_y <= 1e-15);
    }
    SUBCASE("transcendental w on a modest cell") {
        const ScalarField2D w{[](int m, int n, double x, double y) {
            // d^{m+n}/dx^m dy^n of sin(x)*exp(y/2)
            return std::sin(x + (m % 4) * 1.5707963267948966) * std::pow(0.5, n) *
                   std::exp(0.5 * y);
        }};
        const IdentityResidual res =
            verify_integral_identity(w, {0.3, 1.0, -0.2, 0.6}, CellRect{0.1, 0.6, 0.2, 0.8});
        CHECK(res.res_x <= 1e-10 * res.scale_x);
        CHECK(res.res_y <= 1e-10 * res.scale_y);
    }
    SUBCASE("degenerate cells are rejected") {
        std::array<std::array<double, 4>, 4> c{};
        c[2][1] = 1.0;
        CHECK_THROWS_AS(verify_integral_identity(oracle::cubic_field(c), {0, 0, 0, 0},
                                                 CellRect{0.5, 0.5, 0.0, 1.0}),
                        invalid_config);
    }
    SUBCASE("fe-function overload checks the cell index") {
        const TensorMesh2D& m = study_mesh();
        const FEFunction f(m);
        std::array<std::array<double, 4>, 4> c{};
        c[3][3] = 1.0;
        CHECK_THROWS_AS(verify_integral_identity(oracle::cubic_field(c), f, m.N, 0),
                        std::out_of_range);
        const IdentityResidual res = verify_integral_identity(oracle::cubic_field(c), f, 3, 3);
        CHECK(res.res_x <= 1e-12 * std::max(res.scale_x, 1e-30));
    }
}

TEST_CASE("correction csv dump") {
    CorrectionSystem sys;
    sys.N = 8;
    sys.tau = {1.0, 2.0, 3.0};
    solve_correction(sys);
    std::ostringstream os;
    dump_correction_csv(sys, os);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "j,tau,beta");
    int k = 0;
    while (std::getline(is, line)) {
        const size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
        CHECK(std::stoi(line.substr(0, c1)) == sys.j_first() + k);
        CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == sys.tau[k]);
        CHECK(std::stod(line.substr(c2 + 1)) == sys.beta[k]);
        ++k;
    }
    CHECK(k == sys.size());
}
