#include <benchmark/benchmark.h>

#include <cmath>

#include "frc/mild_solver.hpp"
#include "frc/relaxation.hpp"
#include "frc/sobolev_system.hpp"
#include "frc/special_functions.hpp"

namespace {

frc::OperatorTriple desk_triple() {
    frc::Matrix A(3, 3), R(3, 3);
    A << -1.0, 0.3, 0.0, 0.0, -0.8, 0.2, 0.1, 0.0, -1.2;
    R << 0.1, -0.2, 0.0, 0.05, 0.15, -0.1, 0.0, 0.2, 0.1;
    const frc::Matrix L = frc::Matrix::Identity(3, 3) + 0.3 * R;
    const frc::Matrix M = frc::Matrix::Identity(3, 3) + 0.3 * R.transpose();
    return frc::OperatorTriple::make(L, M, -L * A * M);
}

frc::ProblemSpec scalar_problem() {
    frc::ProblemSpec p;
    p.alpha = 0.5;
    p.beta = 0.25;
    p.horizon = 1.0;
    p.x0 = frc::Vector::Zero(1);
    p.triple = frc::OperatorTriple::make(frc::Matrix::Identity(1, 1),
                                         frc::Matrix::Identity(1, 1), frc::Matrix::Zero(1, 1));
    p.channels = 1;
    p.B = {frc::Matrix::Identity(1, 1)};
    p.dynamics.D = {frc::Matrix::Identity(1, 1)};
    frc::Vector lo(1), hi(1);
    lo << -1.0;
    hi << 1.0;
    p.constraint.atoms = {lo, hi};
    frc::CostSpec cost;
    cost.P = frc::Matrix::Identity(1, 1);
    p.costs = {cost};
    return p;
}

void bm_wright_density(benchmark::State& state) {
    const frc::WrightDensity w(0.6);
    double theta = 0.0;
    for (auto _ : state) {
        theta = theta < 5.0 ? theta + 1e-3 : 0.0;
        benchmark::DoNotOptimize(w.value_for_quadrature(theta));
    }
}
BENCHMARK(bm_wright_density);

void bm_mittag_leffler(benchmark::State& state) {
    double z = -5.0;
    for (auto _ : state) {
        z = z < 5.0 ? z + 1e-2 : -5.0;
        benchmark::DoNotOptimize(frc::mittag_leffler(0.7, 1.0, z));
    }
}
BENCHMARK(bm_mittag_leffler);

void bm_mittag_leffler_matrix(benchmark::State& state) {
    const frc::OperatorTriple T = desk_triple();
    for (auto _ : state)
        benchmark::DoNotOptimize(frc::mittag_leffler_matrix(0.6, 1.0, T.A));
}
BENCHMARK(bm_mittag_leffler_matrix);

void bm_propagator_series(benchmark::State& state) {
    const frc::OperatorTriple T = desk_triple();
    for (auto _ : state)
        benchmark::DoNotOptimize(frc::s_alpha(T, 0.6, 1.0, frc::OperatorMethod::series));
}
BENCHMARK(bm_propagator_series);

void bm_propagator_subordination(benchmark::State& state) {
    const frc::OperatorTriple T = desk_triple();
    for (auto _ : state)
        benchmark::DoNotOptimize(frc::s_alpha(T, 0.6, 1.0, frc::OperatorMethod::subordination));
}
BENCHMARK(bm_propagator_subordination);

void bm_mild_solve(benchmark::State& state) {
    const frc::ProblemSpec p = scalar_problem();
    const frc::TimeGrid grid = frc::TimeGrid::uniform(1.0, state.range(0));
    frc::Vector one(1);
    one << 1.0;
    const frc::ControlSignal u = frc::ControlSignal::constant(grid, 1, one);
    for (auto _ : state) benchmark::DoNotOptimize(frc::solve_mild(p, u, grid));
}
BENCHMARK(bm_mild_solve)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void bm_envelope_build(benchmark::State& state) {
    frc::EpigraphAtoms pts;
    for (int j = 0; j < 6; ++j) {
        frc::Vector u(1);
        u << -1.0 + 0.4 * j;
        pts.u.push_back(u);
        pts.cost.push_back(std::cos(1.7 * j));
    }
    for (auto _ : state) benchmark::DoNotOptimize(frc::bipolar_envelope(pts));
}
BENCHMARK(bm_envelope_build);

void bm_weak_norm(benchmark::State& state) {
    const frc::TimeGrid grid = frc::TimeGrid::uniform(1.0, state.range(0));
    std::vector<frc::Vector> cells(grid.cells, frc::Vector::Zero(1));
    for (int c = 0; c < grid.cells; ++c) cells[c](0) = (c % 2 == 0) ? 1.0 : -1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            frc::weak_norm(grid, std::span<const frc::Vector>(cells.data(), cells.size())));
}
BENCHMARK(bm_weak_norm)->Arg(1024)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
