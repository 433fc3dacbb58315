#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trackfuse/events.hpp"
#include "trackfuse/fusion.hpp"
#include "trackfuse/metrics.hpp"
#include "trackfuse/simulator.hpp"
#include "trackfuse/transport.hpp"

namespace trackfuse {

struct EngineConfigs {
    FilterConfig filter;
    AssociationConfig association;
    FusionConfig fusion;
};

/// Apply one dotted-key override, e.g. "filter.n_particles=2000".
/// Unknown keys or unparsable values raise ConfigError.
void apply_override(EngineConfigs& cfgs, std::string_view assignment);

struct E2eResult {
    sim::ScenarioRun scenario;
    std::vector<std::string> event_lines; // events file content, in emission order
    std::vector<TrackEventLine> track_events;
    std::vector<AlertLine> alerts;
    std::vector<double> alert_clock; // engine clock when each alert was raised
    EngineStats stats;
    MetricsReport report;
};

/// Full pipeline: generate the scenario, feed messages in delivery order
/// (advance after every ingest), flush, and score the recorded streams.
E2eResult run_e2e(const sim::ScenarioConfig& scenario, const EngineConfigs& cfgs,
                  kernels::ExecMode mode = kernels::ExecMode::parallel);

struct ReplayResult {
    std::vector<std::string> event_lines;
    std::vector<TrackEventLine> track_events;
    std::vector<AlertLine> alerts;
    std::vector<double> alert_clock;
    EngineStats stats;
};

/// Drain a transport through a fusion engine: ingest each message, advance,
/// run collision detection whenever observations were applied, flush at end
/// of stream.
ReplayResult pump_messages(FusionEngine& engine, MessageSource& source);

/// pump_messages over an in-memory message list (in-process queue backend).
ReplayResult replay_messages(FusionEngine& engine,
                             const std::vector<TrackletMessage>& messages);

} // namespace trackfuse
