#pragma once

#include "bakhfem/norms.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bakhfem {

// Configuration shared by all CLI modes.  validate() throws invalid_config
// with a message naming the offending field; the CLI maps that to exit 2.
struct StudyConfig {
    enum class Mode { Table1, InterpStudy, LemmaSuite, SingleRun };
    Mode mode = Mode::Table1;

    std::vector<double> epsilons{1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    std::vector<int> Ns{8, 16, 32, 64, 128, 256};
    double sigma = 2.5;
    double beta = 1.0;
    double solver_tol = 1e-12;
    int assembly_order = 4; // tensor Gauss points per direction for assembly
    int norm_order = 5;     // rule for callable-vs-FE norms
    std::string problem = "paper-s5";
    std::string out_path;   // CSV destination; empty = stdout only
    unsigned long long seed = 12345;
    bool audit_quadrature = false;
    int threads = 0;        // worker threads across study points; 0 = all cores

    // Optional diagnostic dumps (single-run mode).
    std::string dump_mesh_path, dump_matrix_path, dump_correction_path;

    void validate() const;
};

// One fully processed study point (mesh + assembly + solve + error norms).
struct PointResult {
    ErrorRecord record;
    double err_uI_Piu = 0;     // ||u^I - Pi u||_eps
    int solver_iterations = 0;
    bool solver_direct = false;
    // Relative shifts of the energy error under the audit rules
    // (assembly_order+2, norm_order+2); only set with audit_quadrature.
    double audit_energy_shift = 0;
};

PointResult run_point(double epsilon, int N, const StudyConfig& cfg);

struct Table1Result {
    ConvergenceReport report;
    std::string text_table; // aligned error/rate table, one block per epsilon
    bool all_solved = true;
};

// Runs the (epsilon, N) grid, computes rates, renders the text table and
// writes the CSV to cfg.out_path when set.  Points run in parallel; records
// are ordered by (epsilon, N) regardless of thread timing.
Table1Result run_table1(const StudyConfig& cfg);

struct SuperclosenessResult {
    ConvergenceReport report;
    std::vector<double> slope_superclose; // fitted per epsilon
    std::vector<double> slope_energy;
    bool pass = true; // supercloseness slopes >= 1.85
    std::string text;
};

// Supercloseness study: same pipeline, but judged on the fitted decay of
// ||Pi u - u^N||_eps per epsilon.
SuperclosenessResult run_supercloseness(const StudyConfig& cfg);

struct SuiteCheck {
    std::string name;
    double value = 0;
    double lo = 0, hi = 0;
    bool pass = false;
};

struct LemmaSuiteResult {
    std::vector<SuiteCheck> checks;
    bool all_pass = true;
    std::string text;
};

// Solve-free verification battery: mesh step inequalities across the grid
// (with empirical-constant spread limits), solution-decomposition validation,
// interpolation-error slope suites (smooth part, corrected interpolant,
// correction data, layer interpolants), and randomized spot checks of the
// cell integral identities.  Randomness is seeded from cfg.seed.
LemmaSuiteResult run_lemma_suite(const StudyConfig& cfg);

struct SingleRunResult {
    PointResult point;
    std::string text;
};

// One (epsilon, N) = (epsilons[0], Ns[0]) pipeline pass with optional mesh /
// matrix / correction-data dumps.
SingleRunResult run_single(const StudyConfig& cfg);

// key=value configuration file (one pair per line, '#' comments); unknown
// keys throw invalid_config.  Values use the same syntax as the CLI flags.
void apply_config_file(StudyConfig& cfg, const std::string& path);

// Shared helpers for the CLI and tests.
std::vector<double> parse_double_list(const std::string& csv);
std::vector<int> parse_int_list(const std::string& csv);
StudyConfig::Mode parse_mode(const std::string& name); // throws invalid_config
std::string mode_name(StudyConfig::Mode mode);
std::string fortran_sci(double v, int digits = 3); // 0.132E-01 style

} // namespace bakhfem
