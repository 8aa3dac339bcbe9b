// Timing harness: serial dense reference vs the OpenMP strided pipeline,
// lossless and adaptive, across worker counts.
//
//   bench_compare [qubits=14] [stride_bits=10] [theta=16]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qcs/aalc.hpp"
#include "qcs/circuit.hpp"
#include "qcs/dense.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Row {
    const char* name;
    double seconds;
    double min_ratio;
};

void print_row(const Row& row, double baseline)
{
    std::printf("%-34s %10.3f s %12.4g %10.2fx\n", row.name, row.seconds,
                row.min_ratio, row.seconds / baseline);
}

}  // namespace

int main(int argc, char** argv)
{
    const int n = argc > 1 ? std::atoi(argv[1]) : 14;
    const int stride_bits = argc > 2 ? std::atoi(argv[2]) : (n < 10 ? n : 10);
    const double theta = argc > 3 ? std::atof(argv[3]) : 16.0;

    const qcs::CircuitProgram program = qcs::build_qft(n);
    const qcs::StateGeometry geom = qcs::StateGeometry::make(n, stride_bits);
    const std::uint64_t basis = 1;

    int max_workers = 1;
#ifdef _OPENMP
    max_workers = omp_get_max_threads();
#endif

    std::printf("qft-%d, %zu gates, %llu strides x %llu amplitudes, theta %g\n\n",
                n, program.gates.size(),
                static_cast<unsigned long long>(geom.n_strides()),
                static_cast<unsigned long long>(geom.stride_len()), theta);

    auto t0 = clock_type::now();
    const qcs::DenseState reference = qcs::run_dense(program, basis, 30);
    const double dense_s = seconds_since(t0);
    print_row({"dense reference (serial)", dense_s, 0.0}, dense_s);

    auto run = [&](const qcs::ErrorBoundLadder& ladder, int workers,
                   const char* name) {
        qcs::RunOptions options;
        options.basis = basis;
        options.workers = workers;
        auto start = clock_type::now();
        qcs::RunResult result = qcs::run_program(
            program, ladder, qcs::RatioThreshold(theta), geom, options);
        const double s = seconds_since(start);
        print_row({name, s, result.metrics.overall_min_ratio()}, dense_s);

        qcs::DenseState final_state;
        final_state.n_qubits = n;
        final_state.amplitudes = result.state.to_amplitudes();
        return qcs::fidelity(reference, final_state);
    };

    run(qcs::ErrorBoundLadder::lossless_only(), 1,
        "compressed, lossless, 1 worker");
    const double fid1 = run(qcs::ErrorBoundLadder::default_ladder(), 1,
                            "compressed, adaptive, 1 worker");
    double fid_n = fid1;
    if (max_workers > 1) {
        char label[64];
        std::snprintf(label, sizeof(label), "compressed, adaptive, %d workers",
                      max_workers);
        fid_n = run(qcs::ErrorBoundLadder::default_ladder(), max_workers, label);
    }

    std::printf("\nadaptive fidelity vs dense: %.8f (1 worker), %.8f (%d workers)\n",
                fid1, fid_n, max_workers);
    return 0;
}
