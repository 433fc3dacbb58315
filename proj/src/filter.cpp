#include "trackfuse/filter.hpp"

#include <cmath>
#include <string>

#include "trackfuse/errors.hpp"

namespace trackfuse {

namespace {
constexpr double kUpdateTimeTolerance = 1e-6;
}

void FilterConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    auto non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (n_particles <= 0) throw ConfigError("filter.n_particles must be positive");
    if (!positive(meas_variance)) throw ConfigError("filter.meas_variance must be positive");
    // Zero noise scales are legal: they degenerate to deterministic motion,
    // which the tests lean on.
    if (!non_negative(process_noise_pos))
        throw ConfigError("filter.process_noise_pos must be non-negative");
    if (!non_negative(process_noise_vel))
        throw ConfigError("filter.process_noise_vel must be non-negative");
    if (!non_negative(init_pos_std)) throw ConfigError("filter.init_pos_std must be non-negative");
    if (!non_negative(init_vel_std)) throw ConfigError("filter.init_vel_std must be non-negative");
    if (!positive(ess_threshold_fraction) || ess_threshold_fraction > 1.0)
        throw ConfigError("filter.ess_threshold_fraction must be in (0, 1]");
}

double likelihood(const KinematicState& s, const Observation& obs, double k) {
    return kernels::gauss_likelihood(s, obs.pos, k);
}

ParticleFilter::ParticleFilter(const Observation& obs, const FilterConfig& cfg,
                               RngStream& rng, kernels::ExecMode mode)
    : cfg_(cfg), mode_(mode), last_time_(obs.t) {
    const std::size_t n = static_cast<std::size_t>(cfg_.n_particles);
    particles_.resize(n);
    scratch_.resize(n);
    cumulative_.resize(n);

    const std::uint64_t init_seed = rng.next_u64();
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream g(mix_seed(init_seed, static_cast<std::uint64_t>(i)));
        Particle& p = particles_[i];
        p.state.x_lat = obs.pos.north + cfg_.init_pos_std * g.next_normal();
        p.state.x_lon = obs.pos.east + cfg_.init_pos_std * g.next_normal();
        p.state.dx_lat = cfg_.init_vel_std * g.next_normal();
        p.state.dx_lon = cfg_.init_vel_std * g.next_normal();
        p.weight = w;
    }
}

void ParticleFilter::predict(double t_now, RngStream& rng) {
    if (t_now < last_time_)
        throw TimeError("predict to t=" + std::to_string(t_now) +
                        " before filter time " + std::to_string(last_time_));
    const double dt = t_now - last_time_;
    if (dt == 0.0) return;
    const double sqrt_dt = std::sqrt(dt);
    kernels::predict(particles_, dt, cfg_.process_noise_pos * sqrt_dt,
                     cfg_.process_noise_vel * sqrt_dt, rng.next_u64(), mode_);
    last_time_ = t_now;
}

bool ParticleFilter::update(const Observation& obs) {
    if (std::abs(obs.t - last_time_) > kUpdateTimeTolerance)
        throw TimeError("update at t=" + std::to_string(obs.t) +
                        " does not match filter time " + std::to_string(last_time_));
    kernels::weight_likelihood(particles_, obs.pos, cfg_.meas_variance, mode_);
    const double sum = kernels::weight_sum(particles_);
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        // Every product underflowed: keep the filter alive on uniform weights.
        const double w = 1.0 / static_cast<double>(particles_.size());
        for (Particle& p : particles_) p.weight = w;
        return true;
    }
    kernels::scale_weights(particles_, 1.0 / sum);
    return false;
}

void ParticleFilter::resample(RngStream& rng) {
    kernels::fill_cumulative(particles_, cumulative_);
    const double unit_u = rng.next_unit();
    kernels::resample_systematic(particles_, cumulative_, unit_u, scratch_, mode_);
    particles_.swap(scratch_);
}

bool ParticleFilter::step(const Observation& obs, RngStream& rng) {
    predict(obs.t, rng);
    const bool degenerate = update(obs);
    const double threshold =
        cfg_.ess_threshold_fraction * static_cast<double>(particles_.size());
    if (effective_sample_size() < threshold) resample(rng);
    return degenerate;
}

KinematicState ParticleFilter::estimate() const {
    return kernels::weighted_mean(particles_);
}

double ParticleFilter::effective_sample_size() const {
    return 1.0 / kernels::weight_sum_squares(particles_);
}

} // namespace trackfuse
