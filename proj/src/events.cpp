#include "trackfuse/events.hpp"

#include <json.hpp>

#include "trackfuse/errors.hpp"

namespace trackfuse {

using ordered_json = nlohmann::ordered_json;

std::string encode_truth_line(const sim::GroundTruthSample& s) {
    ordered_json j;
    j["type"] = "truth";
    j["t"] = s.t;
    j["id"] = s.object_id;
    j["lat"] = s.pos.lat;
    j["lon"] = s.pos.lon;
    j["vn"] = s.vn;
    j["ve"] = s.ve;
    return j.dump() + "\n";
}

std::string encode_track_line(const TrackEventLine& e) {
    ordered_json j;
    j["type"] = "track";
    j["id"] = e.id;
    j["t"] = e.t;
    j["lat"] = e.pos.lat;
    j["lon"] = e.pos.lon;
    j["vn"] = e.vn;
    j["ve"] = e.ve;
    return j.dump() + "\n";
}

std::string encode_alert_line(const AlertLine& a) {
    ordered_json j;
    j["type"] = "alert";
    j["a"] = a.a;
    j["b"] = a.b;
    j["t"] = a.t;
    j["d"] = a.d;
    return j.dump() + "\n";
}

TrackEventLine to_track_line(const AppliedObservation& a, const ReferenceOrigin& origin) {
    TrackEventLine e;
    e.id = a.track_id;
    e.t = a.t;
    e.pos = enu_to_geo(position_of(a.estimate), origin);
    e.vn = a.estimate.dx_lat;
    e.ve = a.estimate.dx_lon;
    return e;
}

AlertLine to_alert_line(const CollisionAlert& c) {
    return AlertLine{c.track_a, c.track_b, c.t_closest, c.min_distance};
}

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t start = 0;
    std::size_t lineno = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++lineno;
        if (!line.empty() && line != "\r") fn(line, lineno);
        start = end + 1;
    }
}

ordered_json parse_line(std::string_view line, std::size_t lineno) {
    try {
        return ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError("line " + std::to_string(lineno) + ": " + e.what());
    }
}

} // namespace

std::vector<sim::GroundTruthSample> parse_truth_lines(std::string_view text) {
    std::vector<sim::GroundTruthSample> out;
    for_each_line(text, [&](std::string_view line, std::size_t lineno) {
        ordered_json j = parse_line(line, lineno);
        if (j.value("type", "") != "truth")
            throw DecodeError("line " + std::to_string(lineno) + ": expected truth line");
        try {
            sim::GroundTruthSample s;
            s.t = j.at("t").get<double>();
            s.object_id = j.at("id").get<std::int64_t>();
            s.pos = GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()};
            s.vn = j.at("vn").get<double>();
            s.ve = j.at("ve").get<double>();
            out.push_back(s);
        } catch (const nlohmann::json::exception& e) {
            throw DecodeError("line " + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

EventStream parse_event_lines(std::string_view text) {
    EventStream out;
    for_each_line(text, [&](std::string_view line, std::size_t lineno) {
        ordered_json j = parse_line(line, lineno);
        const std::string type = j.value("type", "");
        try {
            if (type == "track") {
                TrackEventLine e;
                e.id = j.at("id").get<std::int64_t>();
                e.t = j.at("t").get<double>();
                e.pos = GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()};
                e.vn = j.at("vn").get<double>();
                e.ve = j.at("ve").get<double>();
                out.tracks.push_back(e);
            } else if (type == "alert") {
                AlertLine a;
                a.a = j.at("a").get<std::int64_t>();
                a.b = j.at("b").get<std::int64_t>();
                a.t = j.at("t").get<double>();
                a.d = j.at("d").get<double>();
                out.alerts.push_back(a);
            } else {
                throw DecodeError("line " + std::to_string(lineno) +
                                  ": unknown event type \"" + type + "\"");
            }
        } catch (const nlohmann::json::exception& e) {
            throw DecodeError("line " + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

} // namespace trackfuse
