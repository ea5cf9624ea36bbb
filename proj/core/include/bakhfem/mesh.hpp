#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bakhfem {

// Parameters of the graded tensor mesh.  The x-direction resolves an
// exponential layer of width O(eps) at x=0; the y-direction resolves two
// characteristic layers of width O(sqrt(eps)) at y=0 and y=1.
struct MeshConfig {
    int N = 8;            // cells per direction, N % 4 == 0, N >= 8
    double epsilon = 1e-4;
    double sigma = 2.5;   // grading exponent
    double beta = 1.0;    // lower bound of the convection coefficient

    // Throws invalid_config unless all feasibility conditions hold:
    //   N >= 8, N % 4 == 0, 0 < eps < 1, eps <= 1/N,
    //   (sigma*eps/beta)*ln(1/eps) <= 1/2,  sigma*sqrt(eps)*ln(1/eps) <= 1/4.
    // The last two keep the layer patches inside the unit square; every mesh
    // property verified by verify_mesh_lemmas presumes them.
    void validate() const;
};

// Raw grading maps t in [0,1] -> coordinate, with no feasibility gating.
// Exposed so the closed-form transition values can be checked even for
// parameter sets build_mesh would reject.  x branches switch at t=1/2,
// y branches at t=1/4 and t=3/4.
double bakhvalov_x_map(const MeshConfig& cfg, double t);
double bakhvalov_y_map(const MeshConfig& cfg, double t);

enum class Subdomain { OmegaS, OmegaX, OmegaY, OmegaXY };

struct SubdomainTag {
    Subdomain region;
    bool in_omega0; // cell column i == N/2-1, the strip carrying the
                    // interpolant correction
};

struct TensorMesh2D {
    int N = 0;
    double epsilon = 0, sigma = 0, beta = 0;
    std::vector<double> x, y;   // node coordinates, size N+1, strictly increasing
    std::vector<double> hx, hy; // cell widths, size N
    double H = 0;  // uniform coarse x width, x_i for i >= N/2
    double h = 0;  // uniform interior y width, y_j for N/4 <= j < 3N/4
    double d1 = 0, d2 = 0; // slope coefficients of the middle y branch

    int cells() const { return N * N; }
    // Index of the cell [x_i, x_{i+1}) containing the point (clamped to the
    // last cell at the right end).
    int locate_x(double px) const;
    int locate_y(double py) const;
};

// Builds the graded mesh; throws invalid_config when cfg.validate() fails.
TensorMesh2D build_mesh(const MeshConfig& cfg);

// Region tag of cell (i, j) = [x_i, x_{i+1}] x [y_j, y_{j+1}].
// Throws std::out_of_range for indices outside [0, N).
SubdomainTag classify_cell(const TensorMesh2D& mesh, int i, int j);

// One verified mesh inequality.  `ratio` is the empirical constant (the
// quantity divided by its envelope); lo/hi are the pinned admissible bounds
// used for the pass decision.  One-sided checks set lo = 0.
struct MeshLemmaCheck {
    std::string name;
    double ratio;
    double lo, hi;
    bool pass;
};

struct MeshLemmaReport {
    std::vector<MeshLemmaCheck> checks;
    bool all_pass = true;
};

// Evaluates the sharp step-size facts of the graded mesh: the coarse widths
// H and h lie in [1/N, 2/N]; fine widths grow monotonically and stay below
// sigma*eps (resp. sigma*sqrt(eps)); the overlay strip width obeys the
// alpha-graded envelope; the first step and the transition abscissae track
// their closed-form envelopes with grid-independent constants.
MeshLemmaReport verify_mesh_lemmas(const TensorMesh2D& mesh, double alpha);

// Plain CSV dump, columns axis,index,coordinate (x rows then y rows),
// coordinates with 17 significant digits for reproducibility diffs.
void dump_mesh_csv(const TensorMesh2D& mesh, std::ostream& os);

} // namespace bakhfem
