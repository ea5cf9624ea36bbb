// Command-line front end: convergence tables, interpolant studies, the
// verification suite and single diagnostic runs on the layer-adapted mesh.
//
// Exit codes: 0 success, 1 a run or check failed, 2 invalid configuration.

#include "bakhfem/errors.hpp"
#include "bakhfem/study.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <string>

using bakhfem::StudyConfig;

int main(int argc, char** argv) {
    CLI::App app{"bilinear FEM on a layer-adapted tensor mesh"};

    std::string mode_s, epsilons_s, ns_s, config_path;
    StudyConfig cfg; // defaults; config file first, explicit flags override

    auto* o_mode = app.add_option("--mode", mode_s,
                                  "table1 | interp-study | lemma-suite | single-run");
    auto* o_eps = app.add_option("--epsilons", epsilons_s,
                                 "comma-separated perturbation parameters");
    auto* o_ns = app.add_option("--Ns", ns_s, "comma-separated mesh sizes (multiples of 4)");
    double sigma = cfg.sigma, beta = cfg.beta, solver_tol = cfg.solver_tol;
    int assembly_order = cfg.assembly_order, norm_order = cfg.norm_order, threads = cfg.threads;
    unsigned long long seed = cfg.seed;
    std::string out_path, problem = cfg.problem;
    std::string dump_mesh, dump_matrix, dump_correction;
    bool audit = false;

    auto* o_sigma = app.add_option("--sigma", sigma, "mesh grading exponent");
    auto* o_beta = app.add_option("--beta", beta, "convection lower bound used by the mesh");
    auto* o_tol = app.add_option("--solver-tol", solver_tol, "relative residual target");
    auto* o_aord = app.add_option("--assembly-order", assembly_order,
                                  "Gauss points per direction for assembly");
    auto* o_nord = app.add_option("--norm-order", norm_order,
                                  "Gauss points per direction for error norms");
    auto* o_out = app.add_option("--out", out_path, "CSV output path");
    auto* o_seed = app.add_option("--seed", seed, "seed for randomized checks");
    auto* o_audit = app.add_flag("--audit-quadrature", audit,
                                 "re-run quadrature-dependent stages with stronger rules");
    auto* o_threads = app.add_option("--threads", threads, "worker threads (0 = all cores)");
    auto* o_problem = app.add_option("--problem", problem, "test problem name");
    auto* o_dmesh = app.add_option("--dump-mesh", dump_mesh, "write mesh nodes CSV (single-run)");
    auto* o_dmat = app.add_option("--dump-matrix", dump_matrix,
                                  "write system matrix in Matrix Market form (single-run)");
    auto* o_dcorr = app.add_option("--dump-correction", dump_correction,
                                   "write tau/beta correction CSV (single-run)");
    app.add_option("--config", config_path, "key=value file; explicit flags override it")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty())
            bakhfem::apply_config_file(cfg, config_path);
        if (o_mode->count())
            cfg.mode = bakhfem::parse_mode(mode_s);
        if (o_eps->count())
            cfg.epsilons = bakhfem::parse_double_list(epsilons_s);
        if (o_ns->count())
            cfg.Ns = bakhfem::parse_int_list(ns_s);
        if (o_sigma->count())
            cfg.sigma = sigma;
        if (o_beta->count())
            cfg.beta = beta;
        if (o_tol->count())
            cfg.solver_tol = solver_tol;
        if (o_aord->count())
            cfg.assembly_order = assembly_order;
        if (o_nord->count())
            cfg.norm_order = norm_order;
        if (o_out->count())
            cfg.out_path = out_path;
        if (o_seed->count())
            cfg.seed = seed;
        if (o_audit->count())
            cfg.audit_quadrature = audit;
        if (o_threads->count())
            cfg.threads = threads;
        if (o_problem->count())
            cfg.problem = problem;
        if (o_dmesh->count())
            cfg.dump_mesh_path = dump_mesh;
        if (o_dmat->count())
            cfg.dump_matrix_path = dump_matrix;
        if (o_dcorr->count())
            cfg.dump_correction_path = dump_correction;

        switch (cfg.mode) {
        case StudyConfig::Mode::Table1: {
            const auto res = bakhfem::run_table1(cfg);
            std::cout << res.text_table;
            if (!cfg.out_path.empty())
                std::cout << "csv -> " << cfg.out_path << "\n";
            if (!res.all_solved) {
                std::cerr << "error: at least one study point did not solve\n";
                return 1;
            }
            return 0;
        }
        case StudyConfig::Mode::InterpStudy: {
            const auto res = bakhfem::run_supercloseness(cfg);
            std::cout << res.text;
            if (!cfg.out_path.empty())
                std::cout << "csv -> " << cfg.out_path << "\n";
            return res.pass ? 0 : 1;
        }
        case StudyConfig::Mode::LemmaSuite: {
            const auto res = bakhfem::run_lemma_suite(cfg);
            std::cout << res.text;
            return res.all_pass ? 0 : 1;
        }
        case StudyConfig::Mode::SingleRun: {
            const auto res = bakhfem::run_single(cfg);
            std::cout << res.text;
            return res.point.record.solved ? 0 : 1;
        }
        }
        return 2; // unreachable
    } catch (const bakhfem::invalid_config& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
