#include "bakhfem/assemble.hpp"
#include "bakhfem/interpolation.hpp"
#include "bakhfem/mesh.hpp"
#include "bakhfem/norms.hpp"
#include "bakhfem/problem.hpp"
#include "bakhfem/solver.hpp"

#include <benchmark/benchmark.h>

using namespace bakhfem;

namespace {

TensorMesh2D mesh_for(int N) {
    MeshConfig mc;
    mc.N = N;
    mc.epsilon = 1e-6;
    return build_mesh(mc);
}

void BM_BuildMesh(benchmark::State& state) {
    MeshConfig mc;
    mc.N = int(state.range(0));
    mc.epsilon = 1e-6;
    for (auto _ : state) {
        TensorMesh2D m = build_mesh(mc);
        benchmark::DoNotOptimize(m.x.data());
    }
}
BENCHMARK(BM_BuildMesh)->Arg(64)->Arg(256);

void BM_Assemble(benchmark::State& state) {
    const TensorMesh2D mesh = mesh_for(int(state.range(0)));
    const TestProblem p = test_problem(1e-6);
    const QuadratureRule rule(4);
    for (auto _ : state) {
        AssembledSystem sys = assemble(mesh, 1e-6, p.coefficients, rule);
        benchmark::DoNotOptimize(sys.A.vals.data());
    }
}
BENCHMARK(BM_Assemble)->Arg(32)->Arg(64)->Arg(128);

void BM_Solve(benchmark::State& state) {
    const TensorMesh2D mesh = mesh_for(int(state.range(0)));
    const TestProblem p = test_problem(1e-6);
    const AssembledSystem sys = assemble(mesh, 1e-6, p.coefficients, QuadratureRule(4));
    for (auto _ : state) {
        SolveResult res = solve(sys.A, sys.F);
        benchmark::DoNotOptimize(res.x.data());
    }
}
BENCHMARK(BM_Solve)->Arg(32)->Arg(64)->Arg(128);

void BM_BuildTau(benchmark::State& state) {
    const TensorMesh2D mesh = mesh_for(int(state.range(0)));
    const TestProblem p = test_problem(1e-6);
    const QuadratureRule rule(6);
    for (auto _ : state) {
        CorrectionSystem sys = build_tau(p.solution.S.field(), mesh, rule);
        benchmark::DoNotOptimize(sys.tau.data());
    }
}
BENCHMARK(BM_BuildTau)->Arg(64)->Arg(256);

void BM_InterpolantBundle(benchmark::State& state) {
    const TensorMesh2D mesh = mesh_for(int(state.range(0)));
    const TestProblem p = test_problem(1e-6);
    const QuadratureRule rule(6);
    for (auto _ : state) {
        InterpolantBundle bundle = build_Piu(p.solution, mesh, rule);
        benchmark::DoNotOptimize(bundle.Piu.raw().data());
    }
}
BENCHMARK(BM_InterpolantBundle)->Arg(64)->Arg(256);

void BM_EnergyNorm(benchmark::State& state) {
    const TensorMesh2D mesh = mesh_for(int(state.range(0)));
    const TestProblem p = test_problem(1e-6);
    const FEFunction a = FEFunction::from_callable(
        mesh, [&](double x, double y) { return p.solution.u(x, y); });
    const FEFunction b(mesh);
    for (auto _ : state) {
        NormTriple nt = norm_fe_difference(a, b, 1e-6);
        benchmark::DoNotOptimize(nt.energy);
    }
}
BENCHMARK(BM_EnergyNorm)->Arg(128)->Arg(256);

} // namespace

BENCHMARK_MAIN();
