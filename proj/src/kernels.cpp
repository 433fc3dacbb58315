#include "trackfuse/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "trackfuse/random.hpp"

namespace trackfuse::kernels {

namespace {

// Shared per-particle bodies so the serial and OpenMP variants cannot drift.

inline void predict_one(Particle& p, double dt, double pos_std, double vel_std,
                        std::uint64_t noise_seed, std::size_t i) {
    p.state.x_lat += p.state.dx_lat * dt;
    p.state.x_lon += p.state.dx_lon * dt;
    RngStream g(mix_seed(noise_seed, static_cast<std::uint64_t>(i)));
    p.state.x_lat += pos_std * g.next_normal();
    p.state.x_lon += pos_std * g.next_normal();
    p.state.dx_lat += vel_std * g.next_normal();
    p.state.dx_lon += vel_std * g.next_normal();
}

inline std::size_t pick_index(std::span<const double> cumulative, double pos) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pos);
    std::size_t j = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(j, cumulative.size() - 1); // guard against prefix-sum roundoff
}

inline void resample_one(std::span<const Particle> in,
                         std::span<const double> cumulative, double unit_u,
                         std::span<Particle> out, std::size_t i) {
    const double pos = (unit_u + static_cast<double>(i)) / static_cast<double>(out.size());
    out[i] = in[pick_index(cumulative, pos)];
    out[i].weight = 1.0 / static_cast<double>(out.size());
}

} // namespace

void predict_serial(std::span<Particle> ps, double dt, double pos_std,
                    double vel_std, std::uint64_t noise_seed) {
    for (std::size_t i = 0; i < ps.size(); ++i)
        predict_one(ps[i], dt, pos_std, vel_std, noise_seed, i);
}

void predict_parallel(std::span<Particle> ps, double dt, double pos_std,
                      double vel_std, std::uint64_t noise_seed) {
    const std::int64_t n = static_cast<std::int64_t>(ps.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        predict_one(ps[static_cast<std::size_t>(i)], dt, pos_std, vel_std,
                    noise_seed, static_cast<std::size_t>(i));
}

void predict(std::span<Particle> ps, double dt, double pos_std, double vel_std,
             std::uint64_t noise_seed, ExecMode mode) {
    if (mode == ExecMode::serial)
        predict_serial(ps, dt, pos_std, vel_std, noise_seed);
    else
        predict_parallel(ps, dt, pos_std, vel_std, noise_seed);
}

double gauss_likelihood(const KinematicState& s, const EnuPoint& obs, double k) {
    const double de = s.x_lon - obs.east;
    const double dn = s.x_lat - obs.north;
    const double d2 = de * de + dn * dn;
    return std::exp(-d2 / (2.0 * k)) / std::sqrt(2.0 * M_PI * k);
}

void weight_likelihood_serial(std::span<Particle> ps, const EnuPoint& obs, double k) {
    for (Particle& p : ps) p.weight *= gauss_likelihood(p.state, obs, k);
}

void weight_likelihood_parallel(std::span<Particle> ps, const EnuPoint& obs, double k) {
    const std::int64_t n = static_cast<std::int64_t>(ps.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        Particle& p = ps[static_cast<std::size_t>(i)];
        p.weight *= gauss_likelihood(p.state, obs, k);
    }
}

void weight_likelihood(std::span<Particle> ps, const EnuPoint& obs, double k,
                       ExecMode mode) {
    if (mode == ExecMode::serial)
        weight_likelihood_serial(ps, obs, k);
    else
        weight_likelihood_parallel(ps, obs, k);
}

void resample_systematic_serial(std::span<const Particle> in,
                                std::span<const double> cumulative,
                                double unit_u, std::span<Particle> out) {
    for (std::size_t i = 0; i < out.size(); ++i)
        resample_one(in, cumulative, unit_u, out, i);
}

void resample_systematic_parallel(std::span<const Particle> in,
                                  std::span<const double> cumulative,
                                  double unit_u, std::span<Particle> out) {
    const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        resample_one(in, cumulative, unit_u, out, static_cast<std::size_t>(i));
}

void resample_systematic(std::span<const Particle> in,
                         std::span<const double> cumulative, double unit_u,
                         std::span<Particle> out, ExecMode mode) {
    if (mode == ExecMode::serial)
        resample_systematic_serial(in, cumulative, unit_u, out);
    else
        resample_systematic_parallel(in, cumulative, unit_u, out);
}

double weight_sum(std::span<const Particle> ps) {
    double s = 0.0;
    for (const Particle& p : ps) s += p.weight;
    return s;
}

double weight_sum_squares(std::span<const Particle> ps) {
    double s = 0.0;
    for (const Particle& p : ps) s += p.weight * p.weight;
    return s;
}

KinematicState weighted_mean(std::span<const Particle> ps) {
    KinematicState m;
    for (const Particle& p : ps) {
        m.x_lat += p.weight * p.state.x_lat;
        m.dx_lat += p.weight * p.state.dx_lat;
        m.x_lon += p.weight * p.state.x_lon;
        m.dx_lon += p.weight * p.state.dx_lon;
    }
    return m;
}

void scale_weights(std::span<Particle> ps, double factor) {
    for (Particle& p : ps) p.weight *= factor;
}

void fill_cumulative(std::span<const Particle> ps, std::span<double> cumulative) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        acc += ps[i].weight;
        cumulative[i] = acc;
    }
}

} // namespace trackfuse::kernels
