// Compares the serial reference kernels against the OpenMP ones: Bellman
// sweeps at several grid sizes, the passive-set lambda sweep, and batched
// index evaluation. Outputs one row per case with the speedup.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "crawl/dp_oracle.hpp"
#include "crawl/model.hpp"
#include "crawl/whittle.hpp"

using namespace crawl;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e100;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-36s %10.4f s %10.4f s %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
    const SourceParams src = make_source(250.0, 1.0, 0.7, 1.0, 1.0);
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-36s %12s %12s %9s\n", "case", "serial", "openmp", "speedup");

    for (const std::int64_t grid_n : {4001L, 50001L, 200001L}) {
        const SubsidyProblem prob{src, 0.6 * src.u_star};
        DiscountedOptions opts;
        opts.grid_n = grid_n;
        opts.tol = 1e-9 * src.u_star;

        ValueFunction serial_vf, parallel_vf;
        opts.exec = Exec::Serial;
        const double t_serial = time_best_of(3, [&] { serial_vf = solve_discounted(prob, 0.99, opts); });
        opts.exec = Exec::OpenMP;
        const double t_parallel = time_best_of(3, [&] { parallel_vf = solve_discounted(prob, 0.99, opts); });

        bool identical = serial_vf.values == parallel_vf.values;
        char name[64];
        std::snprintf(name, sizeof(name), "solve_discounted grid=%lld%s",
                      static_cast<long long>(grid_n), identical ? "" : " MISMATCH");
        row(name, t_serial, t_parallel);
    }

    {
        std::vector<double> lambdas(24);
        for (std::size_t j = 0; j < lambdas.size(); ++j)
            lambdas[j] = 2.0 * src.u_star * static_cast<double>(j) / 23.0;
        const double t_serial =
            time_best_of(3, [&] { passive_set_sweep(src, lambdas, 0.99, 2001, Exec::Serial); });
        const double t_parallel =
            time_best_of(3, [&] { passive_set_sweep(src, lambdas, 0.99, 2001, Exec::OpenMP); });
        row("passive_set_sweep 24 lambdas", t_serial, t_parallel);
    }

    {
        const std::size_t n = 4'000'000;
        std::vector<double> states(n), out_serial(n), out_parallel(n);
        for (std::size_t i = 0; i < n; ++i)
            states[i] = src.u + (src.u_star - src.u) * static_cast<double>(i) / static_cast<double>(n);
        const double t_serial =
            time_best_of(3, [&] { whittle_index_batch(states, src, out_serial, Exec::Serial); });
        const double t_parallel =
            time_best_of(3, [&] { whittle_index_batch(states, src, out_parallel, Exec::OpenMP); });
        row(out_serial == out_parallel ? "whittle_index_batch 4M states"
                                       : "whittle_index_batch 4M MISMATCH",
            t_serial, t_parallel);
    }
    return 0;
}
