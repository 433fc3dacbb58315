#include "trackfuse/tracklet.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace trackfuse {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ClassLabel c) {
    switch (c) {
        case ClassLabel::vehicle: return "vehicle";
        case ClassLabel::pedestrian: return "pedestrian";
        case ClassLabel::camera: return "camera";
        case ClassLabel::unknown: break;
    }
    return "unknown";
}

std::optional<ClassLabel> class_from_string(std::string_view s) {
    if (s == "vehicle") return ClassLabel::vehicle;
    if (s == "pedestrian") return ClassLabel::pedestrian;
    if (s == "camera") return ClassLabel::camera;
    if (s == "unknown") return ClassLabel::unknown;
    return std::nullopt;
}

std::vector<std::string> tracklet_violations(const Tracklet& t) {
    std::vector<std::string> out;
    if (t.points.empty()) {
        out.push_back("empty points");
        return out;
    }
    bool increasing = true;
    bool times_ok = true;
    bool coords_ok = true;
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        const TrackPoint& p = t.points[i];
        if (!std::isfinite(p.t) || p.t < 0.0) times_ok = false;
        if (!geo_point_valid(p.pos)) coords_ok = false;
        if (i > 0 && !(p.t > t.points[i - 1].t)) increasing = false;
    }
    if (!times_ok) out.push_back("timestamp not finite and non-negative");
    if (!increasing) out.push_back("non-increasing timestamps");
    if (!coords_ok) out.push_back("out-of-range coordinates");
    if (coords_ok) {
        // Pairwise span check; tracklets are short so quadratic cost is moot.
        const ReferenceOrigin ref{t.points.front().pos};
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            for (std::size_t j = i + 1; j < t.points.size(); ++j) {
                if (enu_distance(geo_to_enu(t.points[i].pos, ref),
                                 geo_to_enu(t.points[j].pos, ref)) > kMaxTrackletSpanMeters) {
                    out.push_back("points farther than 100 km apart");
                    i = t.points.size();
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<std::string> message_violations(const TrackletMessage& m) {
    std::vector<std::string> out = tracklet_violations(m.tracklet);
    if (m.schema_version != kSchemaVersion) out.push_back("unknown schema version");
    if (!std::isfinite(m.sent_at)) out.push_back("sent_at not finite");
    if (!m.tracklet.points.empty() && std::isfinite(m.sent_at) &&
        m.sent_at < m.tracklet.points.back().t) {
        out.push_back("sent_at earlier than last point");
    }
    return out;
}

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += "; ";
        s += parts[i];
    }
    return s;
}

double require_number(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw DecodeError(std::string("missing or non-numeric field \"") + key + "\"");
    return it->get<double>();
}

} // namespace

std::string encode_message(const TrackletMessage& m) {
    ordered_json j;
    j["v"] = m.schema_version;
    j["sent_at"] = m.sent_at;
    j["camera_id"] = m.tracklet.camera_id;
    j["object_id"] = m.tracklet.local_object_id;
    j["class"] = to_string(m.tracklet.class_label);
    ordered_json pts = ordered_json::array();
    for (const TrackPoint& p : m.tracklet.points) {
        ordered_json jp;
        jp["t"] = p.t;
        jp["lat"] = p.pos.lat;
        jp["lon"] = p.pos.lon;
        pts.push_back(std::move(jp));
    }
    j["points"] = std::move(pts);
    return j.dump() + "\n";
}

TrackletMessage decode_message(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
        line.remove_suffix(1);

    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(std::string("malformed message: ") + e.what());
    }
    if (!j.is_object()) throw DecodeError("message is not a JSON object");

    auto v = j.find("v");
    if (v == j.end() || !v->is_number_integer())
        throw DecodeError("missing schema version");
    if (v->get<int>() != kSchemaVersion)
        throw DecodeError("unknown schema version " + v->dump());

    TrackletMessage m;
    m.schema_version = v->get<int>();
    m.sent_at = require_number(j, "sent_at");

    auto cam = j.find("camera_id");
    if (cam == j.end() || !cam->is_string()) throw DecodeError("missing camera_id");
    m.tracklet.camera_id = cam->get<std::string>();

    auto oid = j.find("object_id");
    if (oid == j.end() || !oid->is_number_integer()) throw DecodeError("missing object_id");
    m.tracklet.local_object_id = oid->get<std::int64_t>();

    auto cls = j.find("class");
    if (cls == j.end() || !cls->is_string()) throw DecodeError("missing class");
    auto label = class_from_string(cls->get<std::string>());
    if (!label) throw DecodeError("unknown class \"" + cls->get<std::string>() + "\"");
    m.tracklet.class_label = *label;

    auto pts = j.find("points");
    if (pts == j.end() || !pts->is_array()) throw DecodeError("missing points array");
    for (const auto& jp : *pts) {
        if (!jp.is_object()) throw DecodeError("point is not an object");
        TrackPoint p;
        p.t = require_number(jp, "t");
        p.pos.lat = require_number(jp, "lat");
        p.pos.lon = require_number(jp, "lon");
        m.tracklet.points.push_back(p);
    }

    if (auto bad = message_violations(m); !bad.empty())
        throw DecodeError("invalid message: " + join(bad));
    return m;
}

} // namespace trackfuse
