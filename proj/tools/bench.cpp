// Benchmark of the OpenMP kernels against their serial reference versions.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "xva/exposure.hpp"
#include "xva/parallel.hpp"
#include "xva/scenario.hpp"

using namespace xva;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CreditSetup bench_credit() {
    CreditSetup credit;
    auto curve = [](double bps) {
        CreditCurve c;
        c.tenors = {1.0, 5.0, 10.0, 30.0};
        c.spreads_bps = {bps, bps * 1.5, bps * 1.8, bps * 2.0};
        c.recovery = 0.4;
        c.bootstrap();
        return c;
    };
    credit.counterparty_names = {"A", "B"};
    credit.counterparty_curves = {curve(50.0), curve(150.0)};
    credit.bank_curve = curve(80.0);
    return credit;
}

Portfolio bench_portfolio() {
    Portfolio p;
    NettingSet a;
    a.id = "A";
    a.counterparty_id = "A";
    a.trades.push_back({"1", TradeType::PayerSwap, 1e4, 20.0, {}, 6, 3, "A"});
    a.trades.push_back({"2", TradeType::ReceiverSwap, 1e4, 5.0, {}, 6, 3, "A"});
    NettingSet b;
    b.id = "B";
    b.counterparty_id = "B";
    b.trades.push_back({"3", TradeType::ReceiverSwap, 1e4, 30.0, {}, 6, 3, "B"});
    p.sets = {a, b};
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n_paths = 20000;
    if (argc > 1) n_paths = static_cast<std::size_t>(std::atol(argv[1]));

    const TimeGrid grid = TimeGrid::regular(30.0, 0.25);
    ModelParams params;
    params.r0 = 0.01;
    params.mean_reversion = 0.03;
    params.rate_vol = 0.008;
    params.long_term_rate = 0.035;
    const CreditSetup credit = bench_credit();
    const Portfolio portfolio = bench_portfolio();
    const ExposureModel model(portfolio, params, credit, grid);

    std::printf("paths: %zu, grid points: %zu, threads: %d\n", n_paths, grid.size(),
                thread_count());

    auto t0 = std::chrono::steady_clock::now();
    const ScenarioSet serial_paths = reference::generate_primary(params, grid, n_paths, credit, 7);
    const double t_serial_gen = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const ScenarioSet omp_paths = generate_primary(params, grid, n_paths, credit, 7);
    const double t_omp_gen = seconds_since(t0);

    const bool gen_match =
        std::memcmp(serial_paths.short_rate.data(), omp_paths.short_rate.data(),
                    sizeof(double) * serial_paths.short_rate.size()) == 0 &&
        std::memcmp(serial_paths.discount.data(), omp_paths.discount.data(),
                    sizeof(double) * serial_paths.discount.size()) == 0 &&
        std::memcmp(serial_paths.default_time.data(), omp_paths.default_time.data(),
                    sizeof(double) * serial_paths.default_time.size()) == 0;

    t0 = std::chrono::steady_clock::now();
    const ExposureCube serial_cube = reference::build_cube(model, serial_paths);
    const double t_serial_cube = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const ExposureCube omp_cube = build_cube(model, omp_paths);
    const double t_omp_cube = seconds_since(t0);

    const bool cube_match = std::memcmp(serial_cube.P.data(), omp_cube.P.data(),
                                        sizeof(double) * serial_cube.P.size()) == 0;

    std::printf("%-22s %10s %10s %9s %6s\n", "kernel", "serial(s)", "openmp(s)", "speedup",
                "match");
    std::printf("%-22s %10.3f %10.3f %8.2fx %6s\n", "generate_primary", t_serial_gen, t_omp_gen,
                t_serial_gen / t_omp_gen, gen_match ? "yes" : "NO");
    std::printf("%-22s %10.3f %10.3f %8.2fx %6s\n", "build_cube", t_serial_cube, t_omp_cube,
                t_serial_cube / t_omp_cube, cube_match ? "yes" : "NO");
    return (gen_match && cube_match) ? 0 : 1;
}
