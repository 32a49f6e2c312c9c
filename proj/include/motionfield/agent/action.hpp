// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "motionfield/camera_path.hpp"
#include "motionfield/trajectory.hpp"

namespace motionfield::agent {

using ArgumentValue = std::variant<long long, double, std::string>;

struct Argument {
    std::string name;
    ArgumentValue value;

    bool operator==(const Argument&) const = default;
};

/// A validated function call taken from a backend reply.
struct AgentAction {
    std::string function_name;          // Set_1_Points ... Set_4_Points or Set_Camera_Motion
    std::vector<Argument> arguments;    // canonical, typed
    std::string raw_text;               // the call as the backend wrote it
    std::variant<TrajectorySpec, CameraMotionSpec> payload;

    bool is_camera() const noexcept { return std::holds_alternative<CameraMotionSpec>(payload); }
    const CameraMotionSpec& camera() const { return std::get<CameraMotionSpec>(payload); }
    const TrajectorySpec& trajectory() const { return std::get<TrajectorySpec>(payload); }

    /// Canonical call text, e.g. "Set_2_Points (start: 143, top-right; end: 33, bottom-right)".
    std::string call_text() const;

    /// Same function and payload; raw text is ignored.
    bool same_as(const AgentAction& other) const { return function_name == other.function_name && payload == other.payload; }
};

/// Text of the "Action:" section of an Observation/Thought/Action/Summary
/// reply. Throws ErrorKind::missing_action when there is none.
std::string extract_action_section(std::string_view response);

/// Extracts and validates the action. With a grid, area labels are also
/// checked against it. Failure classes map to distinct error kinds:
/// missing_action, unknown_function, arity_mismatch, malformed,
/// invalid_literal, range_violation.
AgentAction parse_action(std::string_view response, const std::optional<GridSpec>& grid = std::nullopt);

/// Parses a bare call such as "Set_Camera_Motion(...)".
AgentAction parse_action_call(std::string_view call, const std::optional<GridSpec>& grid = std::nullopt);

AgentAction make_action(const CameraMotionSpec& spec);
AgentAction make_action(const TrajectorySpec& spec);

std::string format_camera_motion(const CameraMotionSpec& spec);

}  // namespace motionfield::agent
