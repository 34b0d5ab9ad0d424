// Compares the OpenMP kernels against their serial references and checks
// that both produce identical results while they are at it.

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "binae/experiments.hpp"
#include "binae/infometrics.hpp"
#include "binae/models.hpp"
#include "binae/rng.hpp"

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void bench_popcount() {
    const std::size_t n = std::size_t{1} << 22;
    std::vector<std::uint64_t> words(n);
    binae::Rng rng(42);
    for (auto& w : words) w = rng.next();

    Stopwatch sw1;
    std::uint64_t acc1 = 0;
    for (std::uint64_t w : words) acc1 += binae::popcount_u64_portable(w);
    const double t_portable = sw1.ms();

    Stopwatch sw2;
    std::uint64_t acc2 = 0;
    for (std::uint64_t w : words) acc2 += static_cast<std::uint64_t>(std::popcount(w));
    const double t_builtin = sw2.ms();

    const double mb = static_cast<double>(n * 8) / (1024.0 * 1024.0);
    std::printf("popcount  portable %8.1f ms (%7.1f MB/s)\n", t_portable,
                mb / (t_portable / 1000.0));
    std::printf("popcount  builtin  %8.1f ms (%7.1f MB/s)   %s\n", t_builtin,
                mb / (t_builtin / 1000.0),
                acc1 == acc2 ? "sums match" : "SUMS DIFFER");
}

void bench_census() {
    binae::ModelParams p;
    p.n_x = 20;
    p.n_y = 30;
    p.a_x = 10;
    p.a_w = 7;
    p.kind = binae::ModelKind::kwta;
    p.hidden_control = 8;

    binae::Rng rng(1);
    const binae::WeightMatrix w = binae::random_weight_matrix(
        static_cast<std::size_t>(p.n_y), static_cast<std::size_t>(p.n_x),
        static_cast<std::size_t>(p.a_w), rng);
    const binae::EncodeMap f = [&](const binae::BinaryVector& x) {
        return binae::encode_kwta(w, x, p.hidden_control);
    };

    Stopwatch sw1;
    const binae::OmegaCensus serial = binae::omega_census_serial(f, p.n_x);
    const double t_serial = sw1.ms();

    Stopwatch sw2;
    const binae::OmegaCensus parallel = binae::omega_census(f, p.n_x);
    const double t_parallel = sw2.ms();

    std::printf("census    serial   %8.1f ms\n", t_serial);
    std::printf("census    openmp   %8.1f ms   speedup %.2fx   %s\n", t_parallel,
                t_serial / t_parallel,
                serial.class_sizes == parallel.class_sizes ? "censuses match"
                                                           : "CENSUSES DIFFER");
}

void bench_sweep() {
    binae::ExperimentConfig cfg;
    cfg.experiment = binae::ExperimentKind::sweep_sparsity;
    cfg.model = binae::ModelKind::kwta;
    cfg.trials = 50;

    cfg.workers = 1;
    Stopwatch sw1;
    const binae::Table serial = binae::run_experiment(cfg);
    const double t_serial = sw1.ms();

    cfg.workers = 0;
    Stopwatch sw2;
    const binae::Table parallel = binae::run_experiment(cfg);
    const double t_parallel = sw2.ms();

    std::printf("sweep     1 worker %8.1f ms\n", t_serial);
    std::printf("sweep     all      %8.1f ms   speedup %.2fx   %s\n", t_parallel,
                t_serial / t_parallel,
                binae::to_csv(serial) == binae::to_csv(parallel)
                    ? "tables byte-identical"
                    : "TABLES DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif
    bench_popcount();
    bench_census();
    bench_sweep();
    return 0;
}
