// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "motionfield/agent/agent.hpp"
#include "motionfield/densify.hpp"
#include "motionfield/flow_compose.hpp"
#include "motionfield/warp_preview.hpp"

namespace motionfield::agent {

struct PipelineInputs {
    RgbImage image;
    DepthMap depth;
    std::string prompt;
    std::optional<Mask> mask;                    // object region; its centroid is the start point
    std::optional<Eigen::Vector2d> start_point;  // overrides the mask centroid and skips the dialogue
    std::optional<Intrinsics> intrinsics;        // default: Intrinsics::default_for(image size)
    int frames = 24;
    int grid_cols = 20;
    int grid_rows = 10;
    double sigma = kDefaultDensifySigma;
    bool rethink = false;
    int max_rethink_rounds = kDefaultMaxRethinkRounds;
    int feedback_frames = kDefaultFeedbackFrames;
    int identify_rounds = kDefaultIdentifyRounds;
};

struct PipelineResult {
    MotionText motion_text;
    std::optional<Eigen::Vector2d> start_point;
    std::optional<AgentAction> trajectory_action;  // absent without object motion
    std::optional<AgentAction> camera_action;      // absent without camera motion
    std::optional<AgentAction> initial_trajectory_action;
    std::optional<AgentAction> initial_camera_action;
    Intrinsics intrinsics{1, 1, 0, 0, 1, 1};
    double max_depth = 0.0;
    std::vector<std::vector<Eigen::Vector2d>> paths;
    std::vector<Extrinsics> extrinsics;
    std::vector<FlowField> object_flows;
    UnifiedFlow unified;
    std::vector<Frame> preview;
    std::vector<std::pair<std::string, ConversationState>> conversations;
    std::vector<std::string> warnings;
    int rethink_rounds = 0;
};

PipelineResult run_agent_pipeline(ChatBackend& backend, const PipelineInputs& inputs, const TemplateSet& templates = {});

/// Indices of `count` evenly spaced frames out of `total`, first and last included.
std::vector<std::size_t> feedback_frame_indices(std::size_t total, int count);

}  // namespace motionfield::agent
