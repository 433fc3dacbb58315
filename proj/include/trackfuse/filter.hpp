#pragma once

#include <span>
#include <vector>

#include "trackfuse/kernels.hpp"
#include "trackfuse/particle.hpp"
#include "trackfuse/random.hpp"

namespace trackfuse {

struct FilterConfig {
    int n_particles = 1000;
    double meas_variance = 4.0;       // k, m^2 (2 m measurement std)
    double process_noise_pos = 0.5;   // m per sqrt(s)
    double process_noise_vel = 1.0;   // m/s per sqrt(s)
    double init_pos_std = 3.0;        // m
    double init_vel_std = 5.0;        // m/s
    double ess_threshold_fraction = 0.5;

    void validate() const;
};

/// Gaussian likelihood of an observation given a particle state: the normal
/// pdf of the planar distance between them, zero mean, variance k.
double likelihood(const KinematicState& s, const Observation& obs, double k);

/// Per-object sequential Monte Carlo estimator: constant-velocity prediction,
/// multiplicative likelihood weighting, systematic resampling on effective
/// sample size collapse, weighted-mean state estimate. Weights are kept
/// normalized to sum 1. One logical owner mutates a filter at a time;
/// distinct filters are safe to step concurrently.
class ParticleFilter {
public:
    ParticleFilter(const Observation& obs, const FilterConfig& cfg, RngStream& rng,
                   kernels::ExecMode mode = kernels::ExecMode::parallel);

    /// Advance all particles to t_now. Throws TimeError when t_now is in the
    /// past. Noise scales with sqrt(dt); dt == 0 leaves the filter untouched.
    void predict(double t_now, RngStream& rng);

    /// Reweight against an observation at the filter's current time (within
    /// 1e-6 s). Returns true when all weights underflowed and were reset to
    /// uniform (a degeneracy event), false otherwise.
    bool update(const Observation& obs);

    /// Systematic resampling; afterwards every weight is 1/N.
    void resample(RngStream& rng);

    /// predict + update + resample-if-degenerate. Returns update's
    /// degeneracy flag.
    bool step(const Observation& obs, RngStream& rng);

    KinematicState estimate() const;
    double effective_sample_size() const;

    double last_time() const { return last_time_; }
    std::span<const Particle> particles() const { return particles_; }
    const FilterConfig& config() const { return cfg_; }

private:
    FilterConfig cfg_;
    kernels::ExecMode mode_;
    double last_time_;
    std::vector<Particle> particles_;
    std::vector<Particle> scratch_;
    std::vector<double> cumulative_;
};

} // namespace trackfuse
