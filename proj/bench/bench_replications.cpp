// Times the serial reference replication loop against the OpenMP runner on
// the same setting and verifies that both produce identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kefdr/sim.hpp"

using namespace kefdr;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    SimSetting s;
    s.n = 200;
    s.m = 40;
    s.k = 8;
    s.rho = 0.5;
    s.gamma = 6.0;
    s.alpha = 0.1;
    s.reps = argc > 1 ? std::atoi(argv[1]) : 100;
    s.master_seed = 20260801;
    s.methods = {Method::M0, Method::M1, Method::M2, Method::M3, Method::M4, Method::M5};

    int threads = 4;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    if (argc > 2) threads = std::atoi(argv[2]);

    std::printf("replications: %d, threads: %d\n", s.reps, threads);

    auto t0 = std::chrono::steady_clock::now();
    SimResult serial = aggregate(run_replications_serial(s), s);
    const double t_serial = seconds_since(t0);
    std::printf("serial reference: %8.2fs (%.1f ms/rep)\n", t_serial,
                1000.0 * t_serial / s.reps);

    t0 = std::chrono::steady_clock::now();
    SimResult parallel = aggregate(run_replications_parallel(s, threads), s);
    const double t_parallel = seconds_since(t0);
    std::printf("openmp runner:    %8.2fs (%.1f ms/rep, speedup %.2fx)\n", t_parallel,
                1000.0 * t_parallel / s.reps, t_serial / std::max(t_parallel, 1e-9));

    bool identical = true;
    for (int mi = 0; mi < kNumMethods; ++mi) {
        if (serial.per_method[mi].fdr_hat != parallel.per_method[mi].fdr_hat ||
            serial.per_method[mi].power_hat != parallel.per_method[mi].power_hat)
            identical = false;
        if (!serial.per_method[mi].reps_completed) continue;
        std::printf("  %s: fdr %.4f power %.4f\n", method_name(static_cast<Method>(mi)),
                    serial.per_method[mi].fdr_hat, serial.per_method[mi].power_hat);
    }
    std::printf("serial and parallel results %s\n", identical ? "IDENTICAL" : "DIFFER");
    return identical ? 0 : 1;
}
