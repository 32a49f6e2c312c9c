// SPDX-License-Identifier: Apache-2.0

#include "motionfield/io/json_formats.hpp"

#include <cmath>

#include "motionfield/error.hpp"
#include "motionfield/io/file.hpp"

#ifndef MOTIONFIELD_VERSION
#define MOTIONFIELD_VERSION "0.0.0"
#endif

namespace motionfield::io {
namespace {

const Json& field(const Json& doc, const char* key) {
    require(doc.is_object(), ErrorKind::malformed, std::string("expected an object holding \"") + key + "\"");
    const auto it = doc.find(key);
    require(it != doc.end(), ErrorKind::malformed, std::string("missing \"") + key + "\"");
    return *it;
}

double number(const Json& doc, const char* key) {
    const Json& v = field(doc, key);
    require(v.is_number(), ErrorKind::malformed, std::string("\"") + key + "\" must be a number");
    const double d = v.get<double>();
    require(std::isfinite(d), ErrorKind::malformed, std::string("\"") + key + "\" must be finite");
    return d;
}

int integer(const Json& doc, const char* key) {
    const Json& v = field(doc, key);
    require(v.is_number_integer(), ErrorKind::malformed, std::string("\"") + key + "\" must be an integer");
    const auto i = v.get<long long>();
    require(i >= INT32_MIN && i <= INT32_MAX, ErrorKind::overflow, std::string("\"") + key + "\" out of range");
    return static_cast<int>(i);
}

std::string text(const Json& doc, const char* key) {
    const Json& v = field(doc, key);
    require(v.is_string(), ErrorKind::malformed, std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
}

Eigen::Vector2d pixel_pair(const Json& v) {
    require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(), ErrorKind::malformed,
            "pixel must be [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

Json parse_json(std::string_view text_in, std::string_view what) {
    try {
        return Json::parse(text_in.begin(), text_in.end());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::malformed, std::string(what) + ": " + e.what());
    }
}

Json read_json(const std::filesystem::path& path) { return parse_json(read_text_file(path), path.string()); }

void write_json(const Json& doc, const std::filesystem::path& path) { write_text_atomic(path, doc.dump(2) + "\n"); }

Json to_json(const Intrinsics& k) {
    return Json{{"fx", k.fx()}, {"fy", k.fy()}, {"cx", k.cx()}, {"cy", k.cy()}, {"width", k.width()},
                {"height", k.height()}};
}

Intrinsics intrinsics_from_json(const Json& doc) {
    return {number(doc, "fx"),  number(doc, "fy"),     number(doc, "cx"),
            number(doc, "cy"), integer(doc, "width"), integer(doc, "height")};
}

Json to_json(const CameraMotionSpec& s) {
    return Json{{"x_translation", s.x_translation}, {"y_translation", s.y_translation},
                {"z_translation", s.z_translation}, {"x_rotation", s.x_rotation},
                {"y_rotation", s.y_rotation},       {"z_rotation", s.z_rotation},
                {"motion_type", std::string(to_string(s.motion_type))}};
}

CameraMotionSpec camera_spec_from_json(const Json& doc) {
    CameraMotionSpec s;
    s.x_translation = number(doc, "x_translation");
    s.y_translation = number(doc, "y_translation");
    s.z_translation = number(doc, "z_translation");
    s.x_rotation = number(doc, "x_rotation");
    s.y_rotation = number(doc, "y_rotation");
    s.z_rotation = number(doc, "z_rotation");
    const std::string type = text(doc, "motion_type");
    const auto parsed = parse_motion_type(type);
    require(parsed.has_value(), ErrorKind::invalid_literal, "unknown motion_type '" + type + "'");
    s.motion_type = *parsed;
    s.validate();
    return s;
}

Json to_json(const TrajectorySpec& spec) {
    Json points = Json::array();
    for (const auto& p : spec.points) points.push_back({{"area", p.area}, {"subarea", std::string(to_string(p.subarea))}});
    return Json{{"points", points}};
}

Json to_json(const TrajectoryDocument& doc) {
    Json list = Json::array();
    for (const auto& t : doc.trajectories) {
        if (t.uses_pixels()) {
            Json pixels = Json::array();
            for (const auto& p : t.pixels) pixels.push_back({p.x(), p.y()});
            list.push_back({{"pixels", pixels}});
        } else {
            list.push_back(to_json(t.grid_points));
        }
    }
    return Json{{"grid", {{"cols", doc.cols}, {"rows", doc.rows}}}, {"trajectories", list}};
}

TrajectoryDocument trajectory_document_from_json(const Json& doc) {
    TrajectoryDocument out;
    if (doc.is_object() && doc.contains("grid")) {
        out.cols = integer(doc["grid"], "cols");
        out.rows = integer(doc["grid"], "rows");
        out.grid_given = true;
    }
    require(out.cols >= 1 && out.rows >= 1, ErrorKind::range_violation, "grid must be at least 1x1");
    const Json& list = field(doc, "trajectories");
    require(list.is_array(), ErrorKind::malformed, "\"trajectories\" must be an array");
    for (const Json& item : list) {
        TrajectoryEntry entry;
        if (item.is_object() && item.contains("pixels")) {
            const Json& pixels = item["pixels"];
            require(pixels.is_array() && !pixels.empty(), ErrorKind::malformed, "\"pixels\" must be a nonempty array");
            for (const Json& p : pixels) entry.pixels.push_back(pixel_pair(p));
        } else {
            const Json& points = field(item, "points");
            require(points.is_array(), ErrorKind::malformed, "\"points\" must be an array");
            for (const Json& p : points) {
                const std::string name = text(p, "subarea");
                const auto sub = parse_subarea(name);
                require(sub.has_value(), ErrorKind::invalid_literal, "unknown subarea '" + name + "'");
                entry.grid_points.points.push_back({integer(p, "area"), *sub});
            }
            entry.grid_points.validate();
        }
        out.trajectories.push_back(std::move(entry));
    }
    return out;
}

std::vector<std::vector<Eigen::Vector2d>> resolve_control_points(const TrajectoryDocument& doc, int width,
                                                                 int height) {
    GridSpec grid{doc.cols, doc.rows, width, height};
    grid.validate();
    std::vector<std::vector<Eigen::Vector2d>> out;
    for (const auto& t : doc.trajectories) {
        if (t.uses_pixels()) {
            out.push_back(t.pixels);
            continue;
        }
        t.grid_points.validate(grid);
        std::vector<Eigen::Vector2d> control;
        for (const auto& p : t.grid_points.points) control.push_back(grid_point_to_pixel(p, grid));
        out.push_back(std::move(control));
    }
    return out;
}

Json to_json(const SparseMotion& sparse) {
    Json anchors = Json::array();
    for (const auto& a : sparse.anchors) {
        anchors.push_back({{"x", a.pixel.x()}, {"y", a.pixel.y()}, {"du", a.displacement.x()},
                           {"dv", a.displacement.y()}});
    }
    return Json{{"anchors", anchors}};
}

SparseMotion sparse_motion_from_json(const Json& doc) {
    const Json& list = field(doc, "anchors");
    require(list.is_array(), ErrorKind::malformed, "\"anchors\" must be an array");
    SparseMotion sparse;
    for (const Json& a : list) {
        sparse.anchors.push_back({{number(a, "x"), number(a, "y")}, {number(a, "du"), number(a, "dv")}});
    }
    return sparse;
}

void RunMetadata::add_input(const std::filesystem::path& path) { input_digests[path.string()] = sha256_file(path); }

Json RunMetadata::to_json() const {
    Json inputs = Json::object();
    for (const auto& [path, digest] : input_digests) inputs[path] = {{"sha256", digest}};
    return Json{{"tool", "motionfield"},   {"version", tool_version()}, {"command", command},
                {"arguments", arguments}, {"constants", constants},    {"inputs", inputs},
                {"outputs", outputs}};
}

std::string tool_version() { return MOTIONFIELD_VERSION; }

}  // namespace motionfield::io
