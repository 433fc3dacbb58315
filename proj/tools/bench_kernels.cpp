// Times the serial reference kernels against their OpenMP counterparts and
// cross-checks that both produce bit-identical particles.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "trackfuse/kernels.hpp"
#include "trackfuse/random.hpp"

using namespace trackfuse;

namespace {

std::vector<Particle> make_particles(std::size_t n, std::uint64_t seed) {
    std::vector<Particle> ps(n);
    RngStream rng(seed);
    double wsum = 0.0;
    for (Particle& p : ps) {
        p.state.x_lat = rng.next_normal(0.0, 50.0);
        p.state.x_lon = rng.next_normal(0.0, 50.0);
        p.state.dx_lat = rng.next_normal(0.0, 5.0);
        p.state.dx_lon = rng.next_normal(0.0, 5.0);
        p.weight = rng.next_unit() + 1e-12;
        wsum += p.weight;
    }
    kernels::scale_weights(ps, 1.0 / wsum);
    return ps;
}

bool identical(const std::vector<Particle>& a, const std::vector<Particle>& b) {
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(Particle)) == 0;
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, std::size_t n, double serial_s, double parallel_s,
            bool bitwise_equal) {
    std::printf("%-10s n=%-9zu serial %10.4f ms   omp %10.4f ms   speedup %5.2fx   %s\n",
                name, n, serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                bitwise_equal ? "identical" : "MISMATCH");
    if (!bitwise_equal) std::exit(1);
}

void bench_size(std::size_t n, int reps) {
    const std::vector<Particle> base = make_particles(n, 42);
    const EnuPoint obs{12.0, -7.0};

    // predict
    std::vector<Particle> a = base;
    std::vector<Particle> b = base;
    const double t_ps = time_best_of(reps, [&] {
        a = base;
        kernels::predict_serial(a, 0.1, 0.16, 0.32, 777);
    });
    const double t_pp = time_best_of(reps, [&] {
        b = base;
        kernels::predict_parallel(b, 0.1, 0.16, 0.32, 777);
    });
    report("predict", n, t_ps, t_pp, identical(a, b));

    // likelihood weighting
    const double t_ls = time_best_of(reps, [&] {
        a = base;
        kernels::weight_likelihood_serial(a, obs, 4.0);
    });
    const double t_lp = time_best_of(reps, [&] {
        b = base;
        kernels::weight_likelihood_parallel(b, obs, 4.0);
    });
    report("likelihood", n, t_ls, t_lp, identical(a, b));

    // systematic resampling
    std::vector<double> cumulative(n);
    kernels::fill_cumulative(base, cumulative);
    std::vector<Particle> out_a(n);
    std::vector<Particle> out_b(n);
    const double t_rs = time_best_of(reps, [&] {
        kernels::resample_systematic_serial(base, cumulative, 0.3711, out_a);
    });
    const double t_rp = time_best_of(reps, [&] {
        kernels::resample_systematic_parallel(base, cumulative, 0.3711, out_b);
    });
    report("resample", n, t_rs, t_rp, identical(out_a, out_b));
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> sizes = {10000, 100000, 1000000};
    int reps = 5;
    if (argc > 1) {
        sizes.clear();
        for (int i = 1; i < argc; ++i) sizes.push_back(std::strtoull(argv[i], nullptr, 10));
    }

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both paths run serially\n");
#endif

    for (std::size_t n : sizes) bench_size(n, reps);
    return 0;
}
