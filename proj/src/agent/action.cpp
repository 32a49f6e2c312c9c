// SPDX-License-Identifier: Apache-2.0

#include "motionfield/agent/action.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "motionfield/call_syntax.hpp"
#include "motionfield/error.hpp"

namespace motionfield::agent {
namespace cs = call_syntax;
namespace {

constexpr std::array<std::string_view, 4> kSections = {"observation", "thought", "action", "summary"};
constexpr std::string_view kCameraFunction = "Set_Camera_Motion";
constexpr std::array<std::string_view, 7> kCameraKeys = {"x_translation", "y_translation", "z_translation",
                                                         "x_rotation",    "y_rotation",    "z_rotation",
                                                         "motion_type"};

/// If `line` opens a section ("Action:", "- **Action:**", "## Thought:" ...),
/// returns the section index and the text after the colon.
std::optional<std::pair<std::size_t, std::string_view>> section_header(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == '-' ||
                               line[i] == '*' || line[i] == '#' || line[i] == '>')) {
        ++i;
    }
    for (std::size_t s = 0; s < kSections.size(); ++s) {
        const std::string_view word = kSections[s];
        if (line.size() - i < word.size()) continue;
        bool match = true;
        for (std::size_t c = 0; c < word.size(); ++c) {
            if (std::tolower(static_cast<unsigned char>(line[i + c])) != word[c]) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        std::size_t j = i + word.size();
        while (j < line.size() && (line[j] == '*' || line[j] == ' ')) ++j;
        if (j < line.size() && line[j] == ':') {
            ++j;
            while (j < line.size() && line[j] == '*') ++j;
            return std::make_pair(s, line.substr(j));
        }
    }
    return std::nullopt;
}

std::string format_number(double value) {
    // Shortest text that reads back to the same double.
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

double decimal_argument(std::string_view name, std::string_view text) {
    const auto value = cs::parse_decimal(cs::unquote(cs::trim(text)));
    require(value.has_value(), ErrorKind::malformed,
            std::string(name) + " must be a number, got '" + std::string(cs::trim(text)) + "'");
    return *value;
}

CameraMotionSpec parse_camera_arguments(std::string_view args) {
    const auto items = cs::split(args, ',');
    std::array<std::optional<std::string_view>, kCameraKeys.size()> values;
    bool any_keyword = false;
    bool any_positional = false;
    std::size_t position = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string_view item = cs::trim(items[i]);
        if (item.empty() && i + 1 == items.size() && i > 0) continue;  // trailing ','
        require(!item.empty(), ErrorKind::malformed, "empty argument in Set_Camera_Motion");
        if (const auto kv = cs::split_key_value(item)) {
            any_keyword = true;
            std::size_t k = 0;
            while (k < kCameraKeys.size() && kCameraKeys[k] != kv->first) ++k;
            require(k < kCameraKeys.size(), ErrorKind::malformed, "unexpected argument '" + std::string(kv->first) + "'");
            require(!values[k].has_value(), ErrorKind::malformed, "duplicate argument '" + std::string(kv->first) + "'");
            values[k] = kv->second;
        } else {
            any_positional = true;
            require(position < kCameraKeys.size(), ErrorKind::arity_mismatch, "Set_Camera_Motion takes 7 arguments");
            values[position++] = item;
        }
    }
    require(!(any_keyword && any_positional), ErrorKind::malformed, "mixed positional and keyword arguments");
    for (std::size_t k = 0; k < kCameraKeys.size(); ++k) {
        require(values[k].has_value(), ErrorKind::arity_mismatch,
                "Set_Camera_Motion is missing '" + std::string(kCameraKeys[k]) + "'");
    }

    CameraMotionSpec spec;
    double* numeric[] = {&spec.x_translation, &spec.y_translation, &spec.z_translation,
                         &spec.x_rotation,    &spec.y_rotation,    &spec.z_rotation};
    for (std::size_t k = 0; k < 6; ++k) *numeric[k] = decimal_argument(kCameraKeys[k], *values[k]);
    const std::string_view literal = cs::unquote(cs::trim(*values[6]));
    const auto type = parse_motion_type(literal);
    require(type.has_value(), ErrorKind::invalid_literal,
            "motion_type must be uniform, decrement or increment, got '" + std::string(literal) + "'");
    spec.motion_type = *type;
    spec.validate();
    return spec;
}

std::vector<Argument> camera_arguments(const CameraMotionSpec& s) {
    return {{"x_translation", s.x_translation}, {"y_translation", s.y_translation},
            {"z_translation", s.z_translation}, {"x_rotation", s.x_rotation},
            {"y_rotation", s.y_rotation},       {"z_rotation", s.z_rotation},
            {"motion_type", std::string(to_string(s.motion_type))}};
}

std::vector<Argument> trajectory_arguments(const TrajectorySpec& spec) {
    static const std::vector<std::vector<std::string>> kRoles = {
        {"start"}, {"start", "end"}, {"start", "mid", "end"}, {"start", "mid_1", "mid_2", "end"}};
    const auto& roles = kRoles.at(spec.points.size() - 1);
    std::vector<Argument> out;
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        out.push_back({roles[i] + "_area", static_cast<long long>(spec.points[i].area)});
        out.push_back({roles[i] + "_subarea", std::string(to_string(spec.points[i].subarea))});
    }
    return out;
}

}  // namespace

std::string AgentAction::call_text() const {
    return is_camera() ? format_camera_motion(camera()) : format_set_points(trajectory());
}

std::string format_camera_motion(const CameraMotionSpec& s) {
    return "Set_Camera_Motion(x_translation: " + format_number(s.x_translation) +
           ", y_translation: " + format_number(s.y_translation) + ", z_translation: " + format_number(s.z_translation) +
           ", x_rotation: " + format_number(s.x_rotation) + ", y_rotation: " + format_number(s.y_rotation) +
           ", z_rotation: " + format_number(s.z_rotation) + ", motion_type: " + std::string(to_string(s.motion_type)) +
           ")";
}

std::string extract_action_section(std::string_view response) {
    std::string section;
    bool inside = false;
    bool found = false;
    while (!response.empty()) {
        const std::size_t nl = response.find('\n');
        const std::string_view line = response.substr(0, nl);
        response = nl == std::string_view::npos ? std::string_view{} : response.substr(nl + 1);
        if (const auto header = section_header(line)) {
            if (inside) break;
            if (kSections[header->first] == "action") {
                inside = found = true;
                section.append(header->second);
                section.push_back('\n');
            }
            continue;
        }
        if (inside) {
            section.append(line);
            section.push_back('\n');
        }
    }
    require(found, ErrorKind::missing_action, "reply has no Action section");
    require(!cs::trim(section).empty(), ErrorKind::missing_action, "Action section is empty");
    return section;
}

AgentAction parse_action_call(std::string_view text, const std::optional<GridSpec>& grid) {
    auto call = cs::find_call(text, "Set_");
    if (!call) {
        if (const auto other = cs::find_call(text)) fail(ErrorKind::unknown_function, "unknown function '" + other->name + "'");
        fail(ErrorKind::malformed, "no function call in action '" + std::string(cs::trim(text)) + "'");
    }
    const std::string raw = call->name + "(" + call->arguments + ")";

    AgentAction action;
    action.raw_text = raw;
    action.function_name = call->name;
    if (call->name == kCameraFunction) {
        const CameraMotionSpec spec = parse_camera_arguments(call->arguments);
        action.arguments = camera_arguments(spec);
        action.payload = spec;
    } else {
        TrajectorySpec spec = parse_set_points(raw);  // unknown names fail here
        if (grid) spec.validate(*grid);
        action.arguments = trajectory_arguments(spec);
        action.payload = std::move(spec);
    }
    return action;
}

AgentAction parse_action(std::string_view response, const std::optional<GridSpec>& grid) {
    return parse_action_call(extract_action_section(response), grid);
}

AgentAction make_action(const CameraMotionSpec& spec) {
    spec.validate();
    AgentAction action;
    action.function_name = std::string(kCameraFunction);
    action.arguments = camera_arguments(spec);
    action.payload = spec;
    action.raw_text = action.call_text();
    return action;
}

AgentAction make_action(const TrajectorySpec& spec) {
    spec.validate();
    AgentAction action;
    action.function_name = "Set_" + std::to_string(spec.points.size()) + "_Points";
    action.arguments = trajectory_arguments(spec);
    action.payload = spec;
    action.raw_text = action.call_text();
    return action;
}

}  // namespace motionfield::agent
