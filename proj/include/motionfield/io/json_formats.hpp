// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "motionfield/camera_path.hpp"
#include "motionfield/densify.hpp"
#include "motionfield/geometry.hpp"
#include "motionfield/trajectory.hpp"

namespace motionfield::io {

using Json = nlohmann::ordered_json;

/// Parses JSON text, mapping syntax errors to ErrorKind::malformed.
Json parse_json(std::string_view text, std::string_view what);
Json read_json(const std::filesystem::path& path);
void write_json(const Json& doc, const std::filesystem::path& path);

// {"fx", "fy", "cx", "cy", "width", "height"}
Json to_json(const Intrinsics& intrinsics);
Intrinsics intrinsics_from_json(const Json& doc);

// {"x_translation", ..., "z_rotation", "motion_type"}
Json to_json(const CameraMotionSpec& spec);
CameraMotionSpec camera_spec_from_json(const Json& doc);

/// One object's trajectory: grid control points or explicit pixel positions.
struct TrajectoryEntry {
    TrajectorySpec grid_points;
    std::vector<Eigen::Vector2d> pixels;

    bool uses_pixels() const noexcept { return !pixels.empty(); }
};

/// {"grid": {"cols", "rows"}, "trajectories": [{"points": [{"area", "subarea"}, ...]} |
///                                               {"pixels": [[x, y], ...]}, ...]}
struct TrajectoryDocument {
    int cols = 20;
    int rows = 10;
    bool grid_given = false;  // false: the document had no "grid" and the defaults apply
    std::vector<TrajectoryEntry> trajectories;
};

Json to_json(const TrajectorySpec& spec);
Json to_json(const TrajectoryDocument& doc);
TrajectoryDocument trajectory_document_from_json(const Json& doc);

/// Control points of every trajectory in pixels for the given image size.
std::vector<std::vector<Eigen::Vector2d>> resolve_control_points(const TrajectoryDocument& doc, int width, int height);

// {"anchors": [{"x", "y", "du", "dv"}, ...]}
Json to_json(const SparseMotion& sparse);
SparseMotion sparse_motion_from_json(const Json& doc);

/// Everything needed to re-run a command: its arguments, the constants in
/// effect and digests of every input file.
struct RunMetadata {
    std::string command;
    std::vector<std::string> arguments;
    Json constants = Json::object();
    std::map<std::string, std::string> input_digests;  // path -> sha256
    Json outputs = Json::object();

    void add_input(const std::filesystem::path& path);
    Json to_json() const;
};

std::string tool_version();

}  // namespace motionfield::io
