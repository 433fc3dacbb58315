#pragma once

#include <cstdint>
#include <span>

#include "trackfuse/particle.hpp"

// Per-particle compute kernels. Each kernel exists twice: a plain serial loop
// (the reference) and an OpenMP version. The two are bit-identical for any
// thread count because every particle's random draws come from its own
// counter-derived stream and every reduction (weight sums, means) runs in a
// fixed left-to-right order outside the parallel regions.

namespace trackfuse::kernels {

enum class ExecMode { serial, parallel };

/// Constant-velocity propagation over dt plus additive Gaussian process
/// noise. Particle i draws its noise from mix_seed(noise_seed, i):
/// position += N(0, pos_std^2), velocity += N(0, vel_std^2), weights
/// untouched. Pass pos_std/vel_std already scaled by sqrt(dt).
void predict_serial(std::span<Particle> ps, double dt, double pos_std,
                    double vel_std, std::uint64_t noise_seed);
void predict_parallel(std::span<Particle> ps, double dt, double pos_std,
                      double vel_std, std::uint64_t noise_seed);
void predict(std::span<Particle> ps, double dt, double pos_std, double vel_std,
             std::uint64_t noise_seed, ExecMode mode);

/// Gaussian position likelihood: pdf of |particle - obs| under N(0, k),
/// k a variance in m^2.
double gauss_likelihood(const KinematicState& s, const EnuPoint& obs, double k);

/// Multiply every weight by its particle's likelihood against obs.
void weight_likelihood_serial(std::span<Particle> ps, const EnuPoint& obs, double k);
void weight_likelihood_parallel(std::span<Particle> ps, const EnuPoint& obs, double k);
void weight_likelihood(std::span<Particle> ps, const EnuPoint& obs, double k,
                       ExecMode mode);

/// Systematic resampling: output slot i copies the input particle whose
/// cumulative weight interval contains (unit_u + i) / n; all output weights
/// become 1/n. cumulative is the left-to-right prefix sum of input weights.
void resample_systematic_serial(std::span<const Particle> in,
                                std::span<const double> cumulative,
                                double unit_u, std::span<Particle> out);
void resample_systematic_parallel(std::span<const Particle> in,
                                  std::span<const double> cumulative,
                                  double unit_u, std::span<Particle> out);
void resample_systematic(std::span<const Particle> in,
                         std::span<const double> cumulative, double unit_u,
                         std::span<Particle> out, ExecMode mode);

// Fixed-order reductions, shared by both execution paths.
double weight_sum(std::span<const Particle> ps);
double weight_sum_squares(std::span<const Particle> ps);
KinematicState weighted_mean(std::span<const Particle> ps);
void scale_weights(std::span<Particle> ps, double factor);
void fill_cumulative(std::span<const Particle> ps, std::span<double> cumulative);

} // namespace trackfuse::kernels
