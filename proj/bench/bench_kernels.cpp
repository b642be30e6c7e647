// Wall-clock comparison of the OpenMP kernels against their serial twins.
#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "mdshap/batch.hpp"
#include "mdshap/simulation.hpp"

namespace {

double seconds(const std::function<void()>& fn, int repeats) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        best = std::min(best, elapsed.count());
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-16s serial %9.4fs  parallel %9.4fs  speedup %5.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
    using namespace mdshap;
    std::printf("threads: %d\n", omp_get_max_threads());

    const std::size_t p = 20;
    const std::size_t n = 2000;
    const Matrix sigma = make_covariance(CovKind::Mix, p, 7);
    const LocationScatter model = LocationScatter::build(Vector::Zero(static_cast<Eigen::Index>(p)), sigma);
    const Matrix clean = generate_clean(n, sigma, 11);
    const Matrix data = inject_structured(clean, model, 0.1, 5.0, 13).data;

    report("explain_rows", seconds([&] { explain_rows_serial(model, data); }, 3),
           seconds([&] { explain_rows(model, data); }, 3));

    DetectOptions options;
    options.record_history = false;
    report("detect_rows/moe", seconds([&] { detect_rows_serial(model, data, Algorithm::MOE, options); }, 1),
           seconds([&] { detect_rows(model, data, Algorithm::MOE, options); }, 1));
    report("detect_rows/scd", seconds([&] { detect_rows_serial(model, data, Algorithm::SCD, options); }, 1),
           seconds([&] { detect_rows(model, data, Algorithm::SCD, options); }, 1));

    GridConfig grid;
    grid.dims = {10};
    grid.gammas = {4.0, 6.0};
    grid.replications = 4;
    report("run_grid", seconds([&] { run_grid_serial(grid); }, 1), seconds([&] { run_grid(grid); }, 1));
    return 0;
}
