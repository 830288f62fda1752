// Serial reference vs OpenMP kernels: wall time and bit-equality per size.
//
//   bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>

#include <omp.h>

#include "synthetic.hpp"
#include "typology/kernels.hpp"
#include "typology/pipeline.hpp"

using namespace typology;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    Matrix m(r, c);
    for (double& x : m.data()) x = d(rng);
    return m;
}

// Best of `reps` runs, in milliseconds.
double time_ms(const std::function<void()>& f, int reps = 5) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

template <typename R>
void row(const char* name, const std::string& size, const std::function<R()>& serial,
         const std::function<R()>& parallel) {
    R a{}, b{};
    const double ts = time_ms([&] { a = serial(); });
    const double tp = time_ms([&] { b = parallel(); });
    std::printf("%-16s %-14s %10.2f %10.2f %8.2fx  %s\n", name, size.c_str(), ts, tp, ts / tp,
                a == b ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
    omp_set_num_threads(threads);
    std::printf("threads: %d\n", threads);
    std::printf("%-16s %-14s %10s %10s %9s  %s\n", "kernel", "size", "serial ms", "omp ms", "speedup", "result");

    for (std::size_t n : {200, 800, 1600}) {
        const Matrix z = random_matrix(n, 600, n);
        const std::string size = std::to_string(n) + "x600";
        row<Matrix>("gram_rows", size, [&] { return kernels::serial::gram_rows(z); },
                    [&] { return kernels::parallel::gram_rows(z); });
        row<Matrix>("multiply", size, [&] { return kernels::serial::multiply(z, z.transposed()); },
                    [&] { return kernels::parallel::multiply(z, z.transposed()); });
        Matrix spd = kernels::serial::gram_rows(z);
        for (std::size_t i = 0; i < n; ++i) spd(i, i) += 1.0;
        row<Matrix>("cholesky", std::to_string(n) + "x" + std::to_string(n),
                    [&] {
                        Matrix a = spd;
                        kernels::serial::cholesky(a);
                        return a;
                    },
                    [&] {
                        Matrix a = spd;
                        kernels::parallel::cholesky(a);
                        return a;
                    });
        row<std::vector<double>>("column_moments", size,
                                 [&] { return kernels::serial::column_moments(z).stddev; },
                                 [&] { return kernels::parallel::column_moments(z).stddev; });
    }
    std::vector<GeoPoint> pts;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int i = 0; i < 200000; ++i) pts.push_back({lat(rng), lon(rng)});
    row<std::vector<double>>("distances_from", "200000", [&] { return kernels::serial::distances_from({1, 2}, pts); },
                             [&] { return kernels::parallel::distances_from({1, 2}, pts); });

    // End to end: association tables and all per-feature fits on a synthetic corpus.
    synthetic::Params p;
    p.features = 40;
    p.seed = 8;
    const auto s = synthetic::make_splits(p, 900, 150, 150);
    const Dataset data(parse_corpus(std::string_view(s.train), Partition::train),
                       parse_corpus(std::string_view(s.dev), Partition::dev),
                       parse_corpus(std::string_view(s.test_blinded), Partition::test));
    const TrainConfig config = TrainConfig::for_system(System::system2);
    for (int jobs : {1, threads}) {
        omp_set_num_threads(jobs);
        const auto t0 = std::chrono::steady_clock::now();
        const AssociationTables t = build_tables_for(data, config.table_partitions, config.radius_km);
        const double tables_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        const auto t1 = std::chrono::steady_clock::now();
        const ModelSet m = train_all(data, config, t, jobs);
        const double train_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
        std::printf("pipeline jobs=%-3d tables %8.1f ms  train %zu models %8.1f ms\n", jobs, tables_ms,
                    m.models.size(), train_ms);
    }
    return 0;
}
