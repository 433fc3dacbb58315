// Command-line harness: scenario generation, fusion replay, end-to-end runs,
// and metrics recomputation over recorded streams.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trackfuse/errors.hpp"
#include "trackfuse/events.hpp"
#include "trackfuse/metrics.hpp"
#include "trackfuse/pipeline.hpp"
#include "trackfuse/simulator.hpp"
#include "trackfuse/tracklet.hpp"
#include "trackfuse/transport.hpp"

namespace fs = std::filesystem;
using namespace trackfuse;

namespace {

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

// Replays a source whose first message was already pulled to pick an origin.
class PrependedSource final : public MessageSource {
public:
    PrependedSource(std::optional<TrackletMessage> head, MessageSource& rest)
        : head_(std::move(head)), rest_(rest) {}
    std::optional<TrackletMessage> next() override {
        if (head_) {
            auto m = std::move(*head_);
            head_.reset();
            return m;
        }
        return rest_.next();
    }

private:
    std::optional<TrackletMessage> head_;
    MessageSource& rest_;
};

std::string truth_file_content(const std::vector<sim::GroundTruthSample>& truth) {
    std::string s;
    for (const auto& sample : truth) s += encode_truth_line(sample);
    return s;
}

std::string messages_file_content(const std::vector<sim::DeliveredMessage>& msgs) {
    std::string s;
    for (const auto& m : msgs) s += encode_message(m.msg);
    return s;
}

std::string joined(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l;
    return s;
}

struct CommonOpts {
    std::vector<std::string> overrides;
    EngineConfigs configs() const {
        EngineConfigs cfgs;
        for (const std::string& o : overrides) apply_override(cfgs, o);
        cfgs.filter.validate();
        cfgs.association.validate();
        cfgs.fusion.validate();
        return cfgs;
    }
};

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    sim::ScenarioConfig cfg = sim::ScenarioConfig::from_file(config_path);
    if (seed) cfg.seed = *seed;
    const sim::ScenarioRun run = sim::run_scenario(cfg);
    ensure_dir(out_dir);
    write_file(fs::path(out_dir) / "truth.jsonl", truth_file_content(run.truth));
    write_file(fs::path(out_dir) / "messages.jsonl", messages_file_content(run.messages));
    std::cerr << "simulate: " << run.points_generated << " detections, "
              << run.messages.size() << " delivered\n";
    return 0;
}

int cmd_fuse(const std::string& in_path, const std::string& out_dir,
             const CommonOpts& common, std::uint64_t seed,
             std::optional<std::pair<double, double>> origin_arg) {
    const EngineConfigs cfgs = common.configs();

    std::unique_ptr<MessageSource> file_source;
    MessageSource* raw = nullptr;
    if (in_path == "-") {
        static StreamReplaySource stdin_source(std::cin);
        raw = &stdin_source;
    } else {
        file_source = std::make_unique<FileReplaySource>(in_path);
        raw = file_source.get();
    }

    std::optional<TrackletMessage> first = raw->next();
    ReferenceOrigin origin;
    if (origin_arg) {
        origin.origin = GeoPoint{origin_arg->first, origin_arg->second};
    } else {
        if (!first || first->tracklet.points.empty())
            throw ConfigError("empty message stream and no --origin given");
        origin.origin = first->tracklet.points.front().pos;
    }
    PrependedSource source(std::move(first), *raw);

    FusionEngine engine(origin, cfgs.fusion, cfgs.filter, cfgs.association, seed);
    const ReplayResult result = pump_messages(engine, source);

    ensure_dir(out_dir);
    write_file(fs::path(out_dir) / "events.jsonl", joined(result.event_lines));
    std::cerr << "fuse: " << result.stats.points_accepted << " applied, "
              << result.stats.points_late_dropped << " late-dropped, "
              << engine.store().tracks_created() << " tracks, "
              << result.alerts.size() << " alerts, " << result.stats.degeneracy_events
              << " degeneracy events\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const CommonOpts& common, std::optional<std::uint64_t> seed) {
    const auto started = std::chrono::steady_clock::now();
    sim::ScenarioConfig cfg = sim::ScenarioConfig::from_file(config_path);
    if (seed) cfg.seed = *seed;
    const EngineConfigs cfgs = common.configs();

    E2eResult result = run_e2e(cfg, cfgs);
    result.report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    ensure_dir(out_dir);
    write_file(fs::path(out_dir) / "truth.jsonl", truth_file_content(result.scenario.truth));
    write_file(fs::path(out_dir) / "messages.jsonl",
               messages_file_content(result.scenario.messages));
    write_file(fs::path(out_dir) / "events.jsonl", joined(result.event_lines));
    write_file(fs::path(out_dir) / "metrics.json", result.report.to_json_line());

    std::cerr << "run: metrics " << result.report.to_json_line();
    std::cerr << "run: runtime " << result.report.runtime_seconds << " s\n";
    return 0;
}

int cmd_metrics(const std::string& truth_path, const std::string& events_path,
                const MetricsOptions& opt) {
    const auto truth = parse_truth_lines(read_file(truth_path));
    const auto events = parse_event_lines(read_file(events_path));
    const MetricsReport report = compute_metrics(truth, events, opt);
    std::cout << report.to_json_line();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-camera tracklet fusion engine"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out;
    std::optional<std::uint64_t> sim_seed;
    auto* simulate = app.add_subcommand("simulate", "Generate truth and message streams");
    simulate->add_option("config", sim_config, "Scenario config file")->required();
    simulate->add_option("--out", sim_out, "Output directory")->required();
    simulate->add_option("--seed", sim_seed, "Override the scenario seed");

    // fuse
    std::string fuse_in, fuse_out;
    CommonOpts fuse_common;
    std::uint64_t fuse_seed = 0;
    std::vector<double> fuse_origin;
    auto* fuse = app.add_subcommand("fuse", "Replay a recorded message stream");
    fuse->add_option("--in", fuse_in, "Messages file (- for stdin)")->required();
    fuse->add_option("--out", fuse_out, "Output directory")->required();
    fuse->add_option("--override", fuse_common.overrides,
                     "Config override, dotted key (e.g. filter.n_particles=2000)");
    fuse->add_option("--seed", fuse_seed, "Engine seed (default 0)");
    fuse->add_option("--origin", fuse_origin,
                     "Reference origin lat lon (default: first point)")
        ->expected(2);

    // run
    std::string run_config, run_out;
    CommonOpts run_common;
    std::optional<std::uint64_t> run_seed;
    auto* run = app.add_subcommand("run", "End-to-end: simulate, fuse, score");
    run->add_option("config", run_config, "Scenario config file")->required();
    run->add_option("--out", run_out, "Output directory")->required();
    run->add_option("--seed", run_seed, "Override the scenario seed");
    run->add_option("--override", run_common.overrides,
                    "Config override, dotted key (e.g. filter.n_particles=2000)");

    // metrics
    std::string met_truth, met_events;
    MetricsOptions met_opt;
    auto* metrics = app.add_subcommand("metrics", "Recompute metrics from recorded files");
    metrics->add_option("--truth", met_truth, "Truth file")->required();
    metrics->add_option("--events", met_events, "Events file")->required();
    metrics->add_option("--collision-distance", met_opt.collision_distance,
                        "Near-miss threshold, m");
    metrics->add_option("--alert-window", met_opt.alert_time_window,
                        "Alert-to-near-miss time window, s");
    metrics->add_option("--burn-in", met_opt.burn_in, "Ignore events this long after start, s");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(sim_config, sim_out, sim_seed);
        if (fuse->parsed()) {
            std::optional<std::pair<double, double>> origin;
            if (!fuse_origin.empty()) origin = {fuse_origin[0], fuse_origin[1]};
            return cmd_fuse(fuse_in, fuse_out, fuse_common, fuse_seed, origin);
        }
        if (run->parsed()) return cmd_run(run_config, run_out, run_common, run_seed);
        if (metrics->parsed()) return cmd_metrics(met_truth, met_events, met_opt);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) { // config, decode, validation
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
