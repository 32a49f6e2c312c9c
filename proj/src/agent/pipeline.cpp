// SPDX-License-Identifier: Apache-2.0

#include "motionfield/agent/pipeline.hpp"

#include <cmath>
#include <cstdio>

#include "motionfield/camera_path.hpp"
#include "motionfield/error.hpp"
#include "motionfield/io/png.hpp"

namespace motionfield::agent {
namespace {

Eigen::Vector2d mask_centroid(const Mask& mask) {
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask(x, y) == 0) continue;
            sx += x;
            sy += y;
            ++n;
        }
    }
    require(n > 0, ErrorKind::invalid_argument, "object mask is empty");
    return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

/// Recomputes paths, flows and preview from the current actions.
void synthesize(const PipelineInputs& in, const GridSpec& grid, PipelineResult& r) {
    r.paths.clear();
    if (r.trajectory_action) {
        std::vector<Eigen::Vector2d> control;
        for (const auto& p : r.trajectory_action->trajectory().points) control.push_back(grid_point_to_pixel(p, grid));
        r.paths.push_back(interpolate(control, in.frames).positions);
    }
    r.object_flows = densify_paths(r.paths, in.frames, grid.width, grid.height, in.mask, in.sigma);
    const CameraMotionSpec camera = r.camera_action ? r.camera_action->camera() : CameraMotionSpec{};
    r.extrinsics = generate_extrinsics(camera, r.max_depth, in.frames);
    r.unified = compose_unified_flow({in.depth, r.intrinsics, r.object_flows, r.extrinsics});
    r.preview = render_sequence(in.image, r.unified);
}

std::vector<ImageAttachment> feedback_attachments(const PipelineResult& r, int count) {
    std::vector<ImageAttachment> out;
    for (const std::size_t k : feedback_frame_indices(r.preview.size(), count)) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.png", k);
        out.push_back({name, "image/png", io::encode_png(r.preview[k].rgb)});
    }
    return out;
}

}  // namespace

std::vector<std::size_t> feedback_frame_indices(std::size_t total, int count) {
    require(count >= 1, ErrorKind::invalid_argument, "need at least one feedback frame");
    if (total == 0) return {};
    const std::size_t n = std::min<std::size_t>(total, static_cast<std::size_t>(count));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = n == 1 ? total - 1 : static_cast<std::size_t>(std::llround(static_cast<double>(i) * static_cast<double>(total - 1) / static_cast<double>(n - 1)));
        out.push_back(k);
    }
    return out;
}

PipelineResult run_agent_pipeline(ChatBackend& backend, const PipelineInputs& in, const TemplateSet& templates) {
    const int w = in.image.width();
    const int h = in.image.height();
    require(w > 0 && h > 0, ErrorKind::invalid_argument, "empty input image");
    require(in.depth.width() == w && in.depth.height() == h, ErrorKind::dimension_mismatch,
            "depth map size does not match the image");
    require(!in.mask || in.mask->same_shape(w, h), ErrorKind::dimension_mismatch, "mask size does not match the image");
    require(in.frames >= 2, ErrorKind::invalid_argument, "need at least 2 frames");
    GridSpec grid{in.grid_cols, in.grid_rows, w, h};
    grid.validate();

    PipelineResult r;
    r.intrinsics = in.intrinsics.value_or(Intrinsics::default_for(w, h));
    require(r.intrinsics.width() == w && r.intrinsics.height() == h, ErrorKind::dimension_mismatch,
            "intrinsics image size does not match the image");
    r.max_depth = in.depth.max_valid();
    require(r.max_depth > 0.0, ErrorKind::invalid_argument, "depth map has no valid pixels");

    Agent agent(backend, templates);
    ConversationState decompose_state;
    r.motion_text = agent.decompose_motion_text(decompose_state, in.prompt);
    r.conversations.emplace_back("decompose", std::move(decompose_state));

    ConversationState plot_state;
    ConversationState camera_state;
    plot_state.max_rethink_rounds = camera_state.max_rethink_rounds = in.max_rethink_rounds;

    if (!r.motion_text.object_text.empty()) {
        if (in.start_point) {
            r.start_point = *in.start_point;
        } else if (in.mask) {
            r.start_point = mask_centroid(*in.mask);
        } else {
            ConversationState identify_state;
            const auto found = agent.identify_object_dialogue(identify_state, r.motion_text.object_text,
                                                              {w / 2.0, h / 2.0}, in.identify_rounds, in.image);
            r.conversations.emplace_back("identify", std::move(identify_state));
            r.start_point = found.point;
            if (!found.confirmed) {
                r.warnings.push_back("start point not confirmed after " + std::to_string(found.rounds) + " rounds");
            }
        }
        r.trajectory_action = agent.plot_trajectory(plot_state, r.motion_text.object_text, *r.start_point, in.image, grid);
    }
    if (!r.motion_text.camera_text.empty()) {
        r.camera_action = agent.generate_camera_motion(camera_state, r.motion_text.camera_text, in.image);
    }
    r.initial_trajectory_action = r.trajectory_action;
    r.initial_camera_action = r.camera_action;
    synthesize(in, grid, r);

    if (in.rethink && (r.trajectory_action || r.camera_action)) {
        for (int round = 0; round < in.max_rethink_rounds; ++round) {
            const auto frames = feedback_attachments(r, in.feedback_frames);
            bool changed = false;
            if (r.trajectory_action) {
                AgentAction next = agent.rethink(plot_state, *r.trajectory_action, r.motion_text.object_text, frames, grid);
                changed = changed || !next.same_as(*r.trajectory_action);
                r.trajectory_action = std::move(next);
            }
            if (r.camera_action) {
                AgentAction next = agent.rethink(camera_state, *r.camera_action, r.motion_text.camera_text, frames, std::nullopt);
                changed = changed || !next.same_as(*r.camera_action);
                r.camera_action = std::move(next);
            }
            r.rethink_rounds = round + 1;
            if (!changed) break;
            synthesize(in, grid, r);
        }
    }
    if (r.trajectory_action) r.conversations.emplace_back("plot", std::move(plot_state));
    if (r.camera_action) r.conversations.emplace_back("camera", std::move(camera_state));
    return r;
}

}  // namespace motionfield::agent
