#include "trackfuse/pipeline.hpp"

#include <charconv>
#include <cmath>

#include "trackfuse/errors.hpp"

namespace trackfuse {

namespace {

double parse_double(std::string_view v, std::string_view key) {
    try {
        std::size_t used = 0;
        const std::string s(v);
        const double x = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(x))
            throw ConfigError("");
        return x;
    } catch (...) {
        throw ConfigError("override " + std::string(key) + ": bad numeric value \"" +
                          std::string(v) + "\"");
    }
}

int parse_int(std::string_view v, std::string_view key) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("override " + std::string(key) + ": bad integer value \"" +
                          std::string(v) + "\"");
    return out;
}

} // namespace

void apply_override(EngineConfigs& cfgs, std::string_view assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("override must look like section.key=value, got \"" +
                          std::string(assignment) + "\"");
    const std::string_view key = assignment.substr(0, eq);
    const std::string_view value = assignment.substr(eq + 1);

    if (key == "filter.n_particles") cfgs.filter.n_particles = parse_int(value, key);
    else if (key == "filter.meas_variance") cfgs.filter.meas_variance = parse_double(value, key);
    else if (key == "filter.process_noise_pos")
        cfgs.filter.process_noise_pos = parse_double(value, key);
    else if (key == "filter.process_noise_vel")
        cfgs.filter.process_noise_vel = parse_double(value, key);
    else if (key == "filter.init_pos_std") cfgs.filter.init_pos_std = parse_double(value, key);
    else if (key == "filter.init_vel_std") cfgs.filter.init_vel_std = parse_double(value, key);
    else if (key == "filter.ess_threshold_fraction")
        cfgs.filter.ess_threshold_fraction = parse_double(value, key);
    else if (key == "association.gate_radius")
        cfgs.association.gate_radius = parse_double(value, key);
    else if (key == "association.confirm_after")
        cfgs.association.confirm_after = parse_int(value, key);
    else if (key == "association.stale_after")
        cfgs.association.stale_after = parse_double(value, key);
    else if (key == "fusion.watermark_delay")
        cfgs.fusion.watermark_delay = parse_double(value, key);
    else if (key == "fusion.prediction_horizon")
        cfgs.fusion.prediction_horizon = parse_double(value, key);
    else if (key == "fusion.prediction_step")
        cfgs.fusion.prediction_step = parse_double(value, key);
    else if (key == "fusion.collision_distance")
        cfgs.fusion.collision_distance = parse_double(value, key);
    else
        throw ConfigError("unknown override key \"" + std::string(key) + "\"");
}

namespace {

void drain_into(FusionEngine& engine, const std::vector<AppliedObservation>& applied,
                ReplayResult& out) {
    for (const AppliedObservation& a : applied) {
        const TrackEventLine line = to_track_line(a, engine.origin());
        out.event_lines.push_back(encode_track_line(line));
        out.track_events.push_back(line);
    }
    if (applied.empty()) return;
    const auto predictions = engine.predict_trajectories();
    for (const CollisionAlert& c : engine.detect_collisions(predictions)) {
        const AlertLine line = to_alert_line(c);
        out.event_lines.push_back(encode_alert_line(line));
        out.alerts.push_back(line);
        out.alert_clock.push_back(engine.clock());
    }
}

} // namespace

ReplayResult pump_messages(FusionEngine& engine, MessageSource& source) {
    ReplayResult out;
    while (auto msg = source.next()) {
        engine.ingest(*msg);
        drain_into(engine, engine.advance(), out);
    }
    drain_into(engine, engine.flush(), out);
    out.stats = engine.stats();
    return out;
}

ReplayResult replay_messages(FusionEngine& engine,
                             const std::vector<TrackletMessage>& messages) {
    QueueTransport queue;
    for (const TrackletMessage& msg : messages) queue.push(msg);
    queue.close();
    return pump_messages(engine, queue);
}

E2eResult run_e2e(const sim::ScenarioConfig& scenario, const EngineConfigs& cfgs,
                  kernels::ExecMode mode) {
    E2eResult out;
    out.scenario = sim::run_scenario(scenario);

    FusionEngine engine(scenario.origin, cfgs.fusion, cfgs.filter, cfgs.association,
                        scenario.seed, mode);
    std::vector<TrackletMessage> messages;
    messages.reserve(out.scenario.messages.size());
    for (const sim::DeliveredMessage& m : out.scenario.messages) messages.push_back(m.msg);

    ReplayResult replay = replay_messages(engine, messages);
    out.event_lines = std::move(replay.event_lines);
    out.track_events = std::move(replay.track_events);
    out.alerts = std::move(replay.alerts);
    out.alert_clock = std::move(replay.alert_clock);
    out.stats = replay.stats;

    MetricsOptions opt;
    opt.collision_distance = cfgs.fusion.collision_distance;
    opt.alert_time_window = cfgs.fusion.prediction_horizon;
    EventStream events{out.track_events, out.alerts};
    out.report = compute_metrics(out.scenario.truth, events, opt);
    out.report.messages_sent = out.scenario.points_generated;
    out.report.messages_delivered = static_cast<std::int64_t>(out.scenario.messages.size());
    out.report.points_late_dropped = out.stats.points_late_dropped;
    return out;
}

} // namespace trackfuse
