#include "bakhfem/mesh.hpp"

#include "bakhfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace bakhfem {

namespace {

std::string cfg_str(const MeshConfig& c) {
    std::ostringstream os;
    os << "(N=" << c.N << ", eps=" << c.epsilon << ", sigma=" << c.sigma
       << ", beta=" << c.beta << ")";
    return os.str();
}

} // namespace

void MeshConfig::validate() const {
    if (N < 8 || N % 4 != 0)
        throw invalid_config("mesh: N must be >= 8 and divisible by 4, got N=" +
                             std::to_string(N));
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw invalid_config("mesh: epsilon must lie in (0,1) " + cfg_str(*this));
    if (!(sigma > 0.0) || !(beta > 0.0))
        throw invalid_config("mesh: sigma and beta must be positive " + cfg_str(*this));
    const double L = -std::log(epsilon); // ln(1/eps)
    if (epsilon > 1.0 / N)
        throw invalid_config("mesh: feasibility requires eps <= 1/N " + cfg_str(*this));
    if (sigma * epsilon / beta * L > 0.5)
        throw invalid_config(
            "mesh: feasibility requires (sigma*eps/beta)*ln(1/eps) <= 1/2 " + cfg_str(*this));
    if (sigma * std::sqrt(epsilon) * L > 0.25)
        throw invalid_config(
            "mesh: feasibility requires sigma*sqrt(eps)*ln(1/eps) <= 1/4; "
            "the y grading does not fit in the unit square otherwise " + cfg_str(*this));
}

// The log arguments are written as (1-2t) + 2*eps*t rather than
// 1 - 2*(1-eps)*t so the transition values come out exactly:
// t=1/2 yields exactly eps, hence x(1/2) = -(sigma*eps/beta)*ln(eps).
double bakhvalov_x_map(const MeshConfig& cfg, double t) {
    const double se = cfg.sigma * cfg.epsilon / cfg.beta;
    if (t <= 0.5)
        return -se * std::log((1.0 - 2.0 * t) + 2.0 * cfg.epsilon * t);
    const double x_half = -se * std::log(cfg.epsilon);
    return 1.0 - (1.0 - x_half) * 2.0 * (1.0 - t);
}

double bakhvalov_y_map(const MeshConfig& cfg, double t) {
    const double sr = cfg.sigma * std::sqrt(cfg.epsilon);
    if (t <= 0.25)
        return -sr * std::log((1.0 - 4.0 * t) + 4.0 * cfg.epsilon * t);
    if (t >= 0.75)
        return 1.0 + sr * std::log((4.0 * t - 3.0) + 4.0 * cfg.epsilon * (1.0 - t));
    const double L = -std::log(cfg.epsilon);
    const double d2 = -2.0 * sr * L;
    const double d1 = 2.0 * (1.0 - sr * L); // continuity at both joints
    return d1 * (t - 0.25) + d2 * (t - 0.75);
}

TensorMesh2D build_mesh(const MeshConfig& cfg) {
    cfg.validate();
    const int N = cfg.N;
    TensorMesh2D m;
    m.N = N;
    m.epsilon = cfg.epsilon;
    m.sigma = cfg.sigma;
    m.beta = cfg.beta;
    m.x.resize(N + 1);
    m.y.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        m.x[i] = bakhvalov_x_map(cfg, double(i) / N);
        m.y[i] = bakhvalov_y_map(cfg, double(i) / N);
    }
    m.x[0] = m.y[0] = 0.0;
    m.x[N] = m.y[N] = 1.0;

    m.hx.resize(N);
    m.hy.resize(N);
    for (int i = 0; i < N; ++i) {
        m.hx[i] = m.x[i + 1] - m.x[i];
        m.hy[i] = m.y[i + 1] - m.y[i];
        if (!(m.hx[i] > 0.0) || !(m.hy[i] > 0.0))
            throw invalid_config("mesh: degenerate cell at index " + std::to_string(i) +
                                 " " + cfg_str(cfg));
    }

    const double L = -std::log(cfg.epsilon);
    const double sr = cfg.sigma * std::sqrt(cfg.epsilon);
    m.H = (1.0 - m.x[N / 2]) * 2.0 / N;
    m.d2 = -2.0 * sr * L;
    m.d1 = 2.0 * (1.0 - sr * L);
    m.h = (m.d1 + m.d2) / N;
    return m;
}

int TensorMesh2D::locate_x(double px) const {
    auto it = std::upper_bound(x.begin(), x.end(), px);
    int i = int(it - x.begin()) - 1;
    return std::clamp(i, 0, N - 1);
}

int TensorMesh2D::locate_y(double py) const {
    auto it = std::upper_bound(y.begin(), y.end(), py);
    int j = int(it - y.begin()) - 1;
    return std::clamp(j, 0, N - 1);
}

SubdomainTag classify_cell(const TensorMesh2D& mesh, int i, int j) {
    const int N = mesh.N;
    if (i < 0 || i >= N || j < 0 || j >= N)
        throw std::out_of_range("classify_cell: cell index out of range");
    // Layer patches are delimited by x_{N/2-1} and y_{N/4-1}, y_{3N/4+1}:
    // cells left of the x boundary see the exponential layer; cells below or
    // above the y band see a characteristic layer.
    const bool left = (i <= N / 2 - 2);
    const bool mid_y = (j >= N / 4 - 1 && j <= 3 * N / 4);
    SubdomainTag tag{};
    if (left)
        tag.region = mid_y ? Subdomain::OmegaX : Subdomain::OmegaXY;
    else
        tag.region = mid_y ? Subdomain::OmegaS : Subdomain::OmegaY;
    tag.in_omega0 = (i == N / 2 - 1);
    return tag;
}

namespace {

void push(MeshLemmaReport& rep, std::string name, double ratio, double lo, double hi,
          bool extra_ok = true) {
    bool pass = extra_ok && std::isfinite(ratio) && ratio >= lo && ratio <= hi;
    rep.all_pass = rep.all_pass && pass;
    rep.checks.push_back({std::move(name), ratio, lo, hi, pass});
}

// sup_{t in (0,1]} t^alpha * ln(1 + a/t), sampled densely; this is the exact
// shape constant of the alpha-graded envelope of the transition step.
double envelope_sup(double alpha, double a) {
    double best = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        double t = std::exp(-18.0 * (1.0 - double(k) / 4000.0)); // e^-18 .. 1
        best = std::max(best, std::pow(t, alpha) * std::log1p(a / t));
    }
    return best;
}

} // namespace

MeshLemmaReport verify_mesh_lemmas(const TensorMesh2D& m, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw invalid_config("verify_mesh_lemmas: alpha must lie in (0,1]");
    MeshLemmaReport rep;
    const int N = m.N;
    const double eps = m.epsilon, sigma = m.sigma, beta = m.beta;
    const double rt = std::sqrt(eps);
    const double L = -std::log(eps);
    const double ulp = std::numeric_limits<double>::epsilon();

    // Partitioning and coarse steps.
    push(rep, "x.sum_widths", std::accumulate(m.hx.begin(), m.hx.end(), 0.0), 1.0 - 8 * ulp,
         1.0 + 8 * ulp);
    push(rep, "y.sum_widths", std::accumulate(m.hy.begin(), m.hy.end(), 0.0), 1.0 - 8 * ulp,
         1.0 + 8 * ulp);
    push(rep, "x.coarse_width_H*N", m.H * N, 1.0, 2.0);
    push(rep, "y.interior_width_h*N", m.h * N, 1.0, 2.0);

    // Fine widths: monotone increase toward the transition, bounded by the
    // layer scale.
    bool mono_x = true;
    for (int i = 0; i + 1 <= N / 2 - 2; ++i)
        mono_x = mono_x && m.hx[i] <= m.hx[i + 1] * (1.0 + 8 * ulp);
    push(rep, "x.fine_widths_monotone<=sigma*eps", m.hx[N / 2 - 2] / (sigma * eps), 0.0, 1.0,
         mono_x);
    bool mono_y = true;
    for (int j = 0; j + 1 <= N / 4 - 2; ++j)
        mono_y = mono_y && m.hy[j] <= m.hy[j + 1] * (1.0 + 8 * ulp);
    push(rep, "y.fine_widths_monotone<=sigma*rteps", m.hy[N / 4 - 2] / (sigma * rt), 0.0, 1.0,
         mono_y);

    // y grading is symmetric about 1/2.
    double sym = 0.0;
    for (int j = 0; j <= N; ++j)
        sym = std::max(sym, std::abs(m.y[j] + m.y[N - j] - 1.0));
    push(rep, "y.symmetry", sym, 0.0, 8 * ulp);

    // Transition-cell widths.  In x both explicit bounds follow from
    // eps*N <= 1; in y only the lower bound is scale-explicit, the upper is
    // covered by the alpha-envelope below.
    push(rep, "x.transition_width>=sigma*eps/2", m.hx[N / 2 - 1] / (sigma * eps), 0.5,
         std::numeric_limits<double>::infinity());
    push(rep, "x.transition_width<=2*sigma/N", m.hx[N / 2 - 1] * N / sigma, 0.0, 2.0);
    push(rep, "y.transition_width>=sigma*rteps/2", m.hy[N / 4 - 1] / (sigma * rt), 0.5,
         std::numeric_limits<double>::infinity());
    // The mirrored widths agree exactly in reals; in doubles each node carries
    // roundoff relative to the unit interval (not to the width), so the window
    // is a few ulp of 1.
    push(rep, "y.transition_width_mirror", std::abs(m.hy[N / 4 - 1] - m.hy[3 * N / 4]),
         0.0, 16 * ulp);

    // First steps and layer-patch abscissae track their envelopes with
    // grid-independent constants (the pinned windows hold for any feasible
    // config; see the step-by-step bounds in the tests).
    push(rep, "x.first_width*N/eps", m.hx[0] * N / eps, sigma, 4.0 * sigma);
    push(rep, "y.first_width*N/rteps", m.hy[0] * N / rt, 3.0 * sigma, 6.0 * sigma);
    push(rep, "x.patch_edge/(sigma*eps*lnN)", m.x[N / 2 - 1] / (sigma * eps * std::log(N)),
         0.25, 1.0);
    push(rep, "y.patch_edge/(sigma*rteps*lnN)", m.y[N / 4 - 1] / (sigma * rt * std::log(N)),
         0.25, 1.0);
    push(rep, "x.transition_point*beta/(sigma*eps*ln(1/eps))", m.x[N / 2] * beta / (sigma * eps * L),
         0.5, 1.0 + 8 * ulp);
    push(rep, "y.transition_point/(sigma*rteps*ln(1/eps))", m.y[N / 4] / (sigma * rt * L),
         0.5, 1.0 + 8 * ulp);

    // Graded decay envelope: h^mu * exp(-beta*x_i/eps) <= C * (eps/N)^mu on
    // the fine region, uniformly in mu in (0, sigma].  The caps are twice the
    // analytic suprema of the continuous envelope family (~(2.8*sigma/beta)^mu
    // in x, ~(5.6*sigma)^mu in y, attained one cell before the transition).
    {
        double worst = 0.0;
        for (int k = 1; k <= 5; ++k) {
            const double mu = sigma * k / 5.0;
            const double cap = 2.0 * std::pow(2.8 * sigma / beta, mu);
            double r = 0.0;
            for (int i = 0; i <= N / 2 - 2; ++i)
                r = std::max(r, std::pow(m.hx[i], mu) * std::exp(-beta * m.x[i] / eps) /
                                    (std::pow(eps, mu) * std::pow(double(N), -mu)));
            worst = std::max(worst, r / cap);
        }
        push(rep, "x.graded_decay_envelope", worst, 0.0, 1.0);
    }
    {
        double worst = 0.0;
        for (int k = 1; k <= 5; ++k) {
            const double mu = sigma * k / 5.0;
            const double cap = 2.0 * std::pow(5.6 * sigma, mu);
            double r = 0.0;
            for (int j = 0; j <= N / 4 - 2; ++j)
                r = std::max(r, std::pow(m.hy[j], mu) * std::exp(-m.y[j] / rt) /
                                    (std::pow(rt, mu) * std::pow(double(N), -mu)));
            worst = std::max(worst, r / cap);
        }
        push(rep, "y.graded_decay_envelope", worst, 0.0, 1.0);
    }

    // alpha-graded bound on the transition widths.  The x envelope is
    // eps^(1-alpha) * N^-alpha; in y the derivable envelope carries
    // eps^(1/2-alpha) (not eps^((1-alpha)/2): the grading argument has eps,
    // not sqrt(eps), inside the logarithm).
    push(rep, "x.alpha_graded_transition",
         m.hx[N / 2 - 1] /
             (2.0 * (sigma / beta) * envelope_sup(alpha, 2.0) * std::pow(eps, 1.0 - alpha) *
              std::pow(double(N), -alpha)),
         0.0, 1.0);
    push(rep, "y.alpha_graded_transition",
         m.hy[N / 4 - 1] /
             (2.0 * sigma * envelope_sup(alpha, 4.0) * std::pow(eps, 0.5 - alpha) *
              std::pow(double(N), -alpha)),
         0.0, 1.0);

    return rep;
}

void dump_mesh_csv(const TensorMesh2D& mesh, std::ostream& os) {
    os << "axis,index,coordinate\n";
    char buf[64];
    for (int i = 0; i <= mesh.N; ++i) {
        std::snprintf(buf, sizeof buf, "%.17E", mesh.x[i]);
        os << "x," << i << ',' << buf << '\n';
    }
    for (int j = 0; j <= mesh.N; ++j) {
        std::snprintf(buf, sizeof buf, "%.17E", mesh.y[j]);
        os << "y," << j << ',' << buf << '\n';
    }
}

} // namespace bakhfem
