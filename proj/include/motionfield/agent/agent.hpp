// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "motionfield/agent/action.hpp"
#include "motionfield/agent/backend.hpp"
#include "motionfield/agent/prompt.hpp"
#include "motionfield/image.hpp"

namespace motionfield::agent {

inline constexpr int kDefaultMaxRethinkRounds = 2;
inline constexpr int kDefaultFeedbackFrames = 6;
inline constexpr int kDefaultIdentifyRounds = 3;

enum class Step { decompose, identify, plot, camera, rethink };
std::string_view to_string(Step step);

struct Turn {
    Step step = Step::decompose;
    std::string prompt;
    std::vector<std::string> attachments;  // labels only
    std::string response;
    std::optional<AgentAction> action;
    std::string error;  // parse failure that triggered a retry
};

/// One conversation: a step, its exchanges and the rethinking count.
struct ConversationState {
    Step step = Step::decompose;
    std::vector<Turn> history;
    int rethink_round = 0;
    int max_rethink_rounds = kDefaultMaxRethinkRounds;

    nlohmann::ordered_json to_json() const;
};

struct MotionText {
    std::string object_text;  // empty: no object motion
    std::string camera_text;  // empty: static camera
};

struct IdentifyResult {
    Eigen::Vector2d point;
    int rounds = 0;
    bool confirmed = false;  // false: round cap hit, point is the last proposal
};

/// Drives the backend through the decompose / identify / plot / camera /
/// rethink exchanges. Every reply is parsed and validated; an unusable reply
/// gets one retry with the parse error appended to the prompt.
class Agent {
public:
    explicit Agent(ChatBackend& backend, TemplateSet templates = {});

    MotionText decompose_motion_text(ConversationState& state, std::string_view prompt);

    IdentifyResult identify_object_dialogue(ConversationState& state, std::string_view object_text,
                                            const Eigen::Vector2d& candidate, int max_rounds, const RgbImage& image);

    AgentAction plot_trajectory(ConversationState& state, std::string_view task, const Eigen::Vector2d& start,
                                const RgbImage& image, const GridSpec& grid);

    AgentAction generate_camera_motion(ConversationState& state, std::string_view task, const RgbImage& image);

    /// Asks for the prior action again given frames rendered from it. The reply
    /// must call the same function. Throws ErrorKind::round_cap once
    /// state.rethink_round has reached state.max_rethink_rounds.
    AgentAction rethink(ConversationState& state, const AgentAction& prior, std::string_view task,
                        std::span<const ImageAttachment> frames, const std::optional<GridSpec>& grid);

private:
    template <class Parse>
    auto exchange(ConversationState& state, Step step, const std::string& prompt,
                  std::span<const ImageAttachment> images, Parse parse);

    ChatBackend& backend_;
    TemplateSet templates_;
};

/// Parses "Object: ...\nCamera: ..." replies; "none" means empty.
MotionText parse_motion_text(std::string_view response);

/// "Answer: confirm" gives nullopt; "Point: (x, y)" gives the point, which must
/// lie inside a width x height image.
std::optional<Eigen::Vector2d> parse_identify_reply(std::string_view response, int width, int height);

}  // namespace motionfield::agent
