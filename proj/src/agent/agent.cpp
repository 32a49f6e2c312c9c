// SPDX-License-Identifier: Apache-2.0

#include "motionfield/agent/agent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "motionfield/call_syntax.hpp"
#include "motionfield/error.hpp"
#include "motionfield/io/png.hpp"

namespace motionfield::agent {
namespace cs = call_syntax;
namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_parse_failure(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::malformed:
        case ErrorKind::missing_action:
        case ErrorKind::unknown_function:
        case ErrorKind::arity_mismatch:
        case ErrorKind::range_violation:
        case ErrorKind::invalid_literal:
            return true;
        default:
            return false;
    }
}

std::string format_pixel(const Eigen::Vector2d& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.0f, %.0f)", p.x(), p.y());
    return buf;
}

ImageAttachment png_attachment(std::string label, const RgbImage& image) {
    return {std::move(label), "image/png", io::encode_png(image)};
}

/// The value after "key:" on the first line starting with it (case-insensitive).
std::optional<std::string> labeled_line(std::string_view response, std::string_view key) {
    while (!response.empty()) {
        const std::size_t nl = response.find('\n');
        std::string_view line = cs::trim(response.substr(0, nl));
        response = nl == std::string_view::npos ? std::string_view{} : response.substr(nl + 1);
        while (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == ' ')) line.remove_prefix(1);
        if (line.size() > key.size() && lower(line.substr(0, key.size())) == key) {
            std::string_view rest = line.substr(key.size());
            while (!rest.empty() && rest.front() == '*') rest.remove_prefix(1);
            if (rest.empty() || rest.front() != ':') continue;
            rest.remove_prefix(1);
            while (!rest.empty() && rest.front() == '*') rest.remove_prefix(1);
            return std::string(cs::unquote(cs::trim(rest)));
        }
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Step step) {
    switch (step) {
        case Step::decompose: return "decompose";
        case Step::identify: return "identify";
        case Step::plot: return "plot";
        case Step::camera: return "camera";
        case Step::rethink: return "rethink";
    }
    return "unknown";
}

nlohmann::ordered_json ConversationState::to_json() const {
    nlohmann::ordered_json turns = nlohmann::ordered_json::array();
    for (const auto& t : history) {
        nlohmann::ordered_json turn{{"step", to_string(t.step)}, {"prompt", t.prompt}, {"attachments", t.attachments},
                                    {"response", t.response}};
        if (t.action) turn["action"] = t.action->call_text();
        if (!t.error.empty()) turn["error"] = t.error;
        turns.push_back(std::move(turn));
    }
    return {{"step", to_string(step)}, {"rethink_round", rethink_round}, {"max_rethink_rounds", max_rethink_rounds},
            {"history", turns}};
}

MotionText parse_motion_text(std::string_view response) {
    const auto object = labeled_line(response, "object");
    const auto camera = labeled_line(response, "camera");
    require(object.has_value() && camera.has_value(), ErrorKind::malformed,
            "expected 'Object:' and 'Camera:' lines");
    auto normalize = [](const std::string& s) {
        const std::string l = lower(s);
        return (l == "none" || l == "none." || l == "n/a" || l == "-") ? std::string{} : s;
    };
    return {normalize(*object), normalize(*camera)};
}

std::optional<Eigen::Vector2d> parse_identify_reply(std::string_view response, int width, int height) {
    if (const auto point = labeled_line(response, "point")) {
        std::string_view text = cs::trim(*point);
        require(text.size() >= 2 && text.front() == '(' && text.back() == ')', ErrorKind::malformed,
                "point must be written (x, y)");
        const auto parts = cs::split(text.substr(1, text.size() - 2), ',');
        require(parts.size() == 2, ErrorKind::malformed, "point must have two coordinates");
        const auto x = cs::parse_decimal(cs::trim(parts[0]));
        const auto y = cs::parse_decimal(cs::trim(parts[1]));
        require(x && y, ErrorKind::malformed, "point coordinates must be numbers");
        require(*x >= 0 && *x < width && *y >= 0 && *y < height, ErrorKind::range_violation,
                "point " + std::string(text) + " is outside the image");
        return Eigen::Vector2d(*x, *y);
    }
    const auto answer = labeled_line(response, "answer");
    require(answer.has_value() && lower(*answer).starts_with("confirm"), ErrorKind::malformed,
            "expected 'Answer: confirm' or 'Point: (x, y)'");
    return std::nullopt;
}

Agent::Agent(ChatBackend& backend, TemplateSet templates) : backend_(backend), templates_(std::move(templates)) {}

template <class Parse>
auto Agent::exchange(ConversationState& state, Step step, const std::string& prompt,
                     std::span<const ImageAttachment> images, Parse parse) {
    state.step = step;
    std::string text = prompt;
    for (int attempt = 0;; ++attempt) {
        ChatMessage message{"user", text, {images.begin(), images.end()}};
        Turn turn;
        turn.step = step;
        turn.prompt = text;
        for (const auto& img : images) turn.attachments.push_back(img.label);
        turn.response = backend_.complete(std::span<const ChatMessage>(&message, 1));
        try {
            auto result = parse(turn.response);
            if constexpr (std::is_same_v<decltype(result), AgentAction>) turn.action = result;
            state.history.push_back(std::move(turn));
            return result;
        } catch (const Error& e) {
            if (!is_parse_failure(e.kind())) throw;
            turn.error = e.what();
            state.history.push_back(std::move(turn));
            if (attempt >= 1) throw;
            text = prompt + "\n\nYour previous reply could not be used (" + e.what() +
                   "). Answer again in the required format.";
        }
    }
}

MotionText Agent::decompose_motion_text(ConversationState& state, std::string_view prompt) {
    require(!cs::trim(prompt).empty(), ErrorKind::invalid_argument, "empty prompt");
    const std::string text = render_prompt(templates_.get("decompose"), {{"prompt", std::string(prompt)}});
    return exchange(state, Step::decompose, text, {}, parse_motion_text);
}

IdentifyResult Agent::identify_object_dialogue(ConversationState& state, std::string_view object_text,
                                               const Eigen::Vector2d& candidate, int max_rounds,
                                               const RgbImage& image) {
    require(max_rounds >= 1, ErrorKind::invalid_argument, "identify needs at least one round");
    require(image.contains(static_cast<int>(std::floor(candidate.x())), static_cast<int>(std::floor(candidate.y()))),
            ErrorKind::range_violation, "candidate point is outside the image");
    const std::string size = std::to_string(image.width()) + "x" + std::to_string(image.height());
    IdentifyResult result{candidate, 0, false};
    for (int round = 1; round <= max_rounds; ++round) {
        RgbImage marked = image;
        draw_ring(marked, result.point, std::max(3.0, std::min(image.width(), image.height()) / 40.0), {255, 0, 0});
        const ImageAttachment attachment = png_attachment("identify_round_" + std::to_string(round) + ".png", marked);
        const std::string text = render_prompt(templates_.get("identify"), {{"object_description", std::string(object_text)},
                                                                           {"point_location", format_pixel(result.point)},
                                                                           {"image_size", size}});
        const auto proposal = exchange(state, Step::identify, text, std::span(&attachment, 1),
                                       [&](std::string_view r) { return parse_identify_reply(r, image.width(), image.height()); });
        result.rounds = round;
        if (!proposal) {
            result.confirmed = true;
            return result;
        }
        result.point = *proposal;
    }
    return result;
}

AgentAction Agent::plot_trajectory(ConversationState& state, std::string_view task, const Eigen::Vector2d& start,
                                   const RgbImage& image, const GridSpec& grid) {
    const RgbImage overlay = render_grid_overlay(image, grid, start);
    const ImageAttachment attachment = png_attachment("grid_overlay.png", overlay);
    const std::string text = render_prompt(templates_.get("trajectory"), {{"task_description", std::string(task)},
                                                                          {"start_point_location", format_pixel(start)},
                                                                          {"grid_cols", std::to_string(grid.cols)},
                                                                          {"grid_rows", std::to_string(grid.rows)}});
    return exchange(state, Step::plot, text, std::span(&attachment, 1), [&](std::string_view r) {
        AgentAction a = parse_action(r, grid);
        require(!a.is_camera(), ErrorKind::unknown_function, "expected a Set_N_Points call, got " + a.function_name);
        return a;
    });
}

AgentAction Agent::generate_camera_motion(ConversationState& state, std::string_view task, const RgbImage& image) {
    const ImageAttachment attachment = png_attachment("first_frame.png", image);
    const std::string text = render_prompt(templates_.get("camera"), {{"task_description", std::string(task)}});
    return exchange(state, Step::camera, text, std::span(&attachment, 1), [](std::string_view r) {
        AgentAction a = parse_action(r);
        require(a.is_camera(), ErrorKind::unknown_function, "expected a Set_Camera_Motion call, got " + a.function_name);
        return a;
    });
}

AgentAction Agent::rethink(ConversationState& state, const AgentAction& prior, std::string_view task,
                           std::span<const ImageAttachment> frames, const std::optional<GridSpec>& grid) {
    require(state.rethink_round < state.max_rethink_rounds, ErrorKind::round_cap,
            "rethinking already ran " + std::to_string(state.rethink_round) + " of " +
                std::to_string(state.max_rethink_rounds) + " rounds");
    std::string labels;
    for (const auto& f : frames) labels += (labels.empty() ? "" : ", ") + f.label;
    const std::string text = render_prompt(templates_.get("rethink"), {{"video_frames", labels.empty() ? "(none)" : labels},
                                                                       {"task_description", std::string(task)},
                                                                       {"former_action", prior.call_text()}});
    AgentAction next = exchange(state, Step::rethink, text, frames, [&](std::string_view r) {
        AgentAction a = parse_action(r, grid);
        require(a.is_camera() == prior.is_camera(), ErrorKind::unknown_function,
                "rethinking must repeat the kind of the previous action (" + prior.function_name + "), got " +
                    a.function_name);
        return a;
    });
    ++state.rethink_round;
    return next;
}

}  // namespace motionfield::agent
