// SPDX-License-Identifier: Apache-2.0

#include "motionfield/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>

#include <CLI11.hpp>

#include "motionfield/agent/pipeline.hpp"
#include "motionfield/camera_path.hpp"
#include "motionfield/densify.hpp"
#include "motionfield/error.hpp"
#include "motionfield/flow_compose.hpp"
#include "motionfield/flow_decompose.hpp"
#include "motionfield/io/depth_io.hpp"
#include "motionfield/io/extrinsics_io.hpp"
#include "motionfield/io/flo.hpp"
#include "motionfield/io/gif.hpp"
#include "motionfield/io/json_formats.hpp"
#include "motionfield/io/png.hpp"
#include "motionfield/parallel.hpp"
#include "motionfield/simd/kernels.hpp"
#include "motionfield/warp_preview.hpp"

namespace motionfield {
namespace {

namespace fs = std::filesystem;
using io::Json;

constexpr int kDefaultFrames = 24;

std::string numbered(std::string_view stem, std::size_t index, std::string_view ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*s_%04zu%.*s", static_cast<int>(stem.size()), stem.data(), index,
                  static_cast<int>(ext.size()), ext.data());
    return buf;
}

std::pair<int, int> parse_size(const std::string& text, const char* what) {
    const std::size_t x = text.find('x');
    require(x != std::string::npos, ErrorKind::usage, std::string(what) + " must look like 20x10, got '" + text + "'");
    int a = 0, b = 0;
    try {
        std::size_t used = 0;
        a = std::stoi(text.substr(0, x), &used);
        require(used == x, ErrorKind::usage, "bad " + std::string(what) + " '" + text + "'");
        b = std::stoi(text.substr(x + 1), &used);
        require(used == text.size() - x - 1, ErrorKind::usage, "bad " + std::string(what) + " '" + text + "'");
    } catch (const std::logic_error&) {
        fail(ErrorKind::usage, "bad " + std::string(what) + " '" + text + "'");
    }
    require(a >= 1 && b >= 1, ErrorKind::usage, std::string(what) + " must be positive");
    return {a, b};
}

Eigen::Vector2d parse_point(const std::string& text) {
    const std::size_t comma = text.find(',');
    require(comma != std::string::npos, ErrorKind::usage, "point must look like x,y");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::logic_error&) {
        fail(ErrorKind::usage, "bad point '" + text + "'");
    }
}

/// flow_0000.flo, flow_0001.flo, ... until the first gap.
std::vector<FlowField> read_flow_sequence(const fs::path& dir) {
    std::vector<FlowField> flows;
    for (std::size_t k = 0;; ++k) {
        const fs::path p = dir / numbered("flow", k, ".flo");
        if (!fs::exists(p)) break;
        flows.push_back(io::read_flo(p));
    }
    require(!flows.empty(), ErrorKind::io, "no flow_0000.flo in " + dir.string());
    return flows;
}

std::vector<DepthMap> read_depth_sequence(const fs::path& dir, std::size_t count) {
    std::vector<DepthMap> out;
    for (std::size_t k = 0; k < count; ++k) {
        fs::path p = dir / numbered("depth", k, ".dpt");
        if (!fs::exists(p)) p = dir / numbered("depth", k, ".png");
        require(fs::exists(p), ErrorKind::io, "missing " + numbered("depth", k, ".dpt|.png") + " in " + dir.string());
        out.push_back(io::read_depth(p));
    }
    return out;
}

void write_flow_sequence(std::span<const FlowField> flows, const fs::path& dir) {
    fs::create_directories(dir);
    parallel_for(flows.size(), [&](std::size_t k) { io::write_flo(flows[k], dir / numbered("flow", k, ".flo")); });
}

void write_frames(std::span<const Frame> frames, const fs::path& dir) {
    fs::create_directories(dir);
    parallel_for(frames.size(), [&](std::size_t k) { io::write_png(frames[k].rgb, dir / numbered("frame", k, ".png")); });
}

Intrinsics load_intrinsics(const std::string& path, int w, int h, std::string& source) {
    if (path.empty()) {
        source = "default: fx = fy = max(width, height), principal point at the image center";
        return Intrinsics::default_for(w, h);
    }
    source = path;
    Intrinsics k = io::intrinsics_from_json(io::read_json(path));
    require(k.width() == w && k.height() == h, ErrorKind::dimension_mismatch,
            "intrinsics are for " + std::to_string(k.width()) + "x" + std::to_string(k.height()) + ", input is " +
                std::to_string(w) + "x" + std::to_string(h));
    return k;
}

Json design_constants() {
    return Json{{"depth_lift", "object-moved pixels keep their frame-0 depth"},
                {"max_depth_rule", "camera translation is scaled by the largest valid frame-0 depth"},
                {"pacing",
                 {{"uniform", "s = k/(K-1)"}, {"increment", "s = (k/(K-1))^2"}, {"decrement", "s = 1 - (1 - k/(K-1))^2"}}},
                {"rotation", "R = Rz(s*tz) Ry(s*ty) Rx(s*tx), angles above 180 taken as negative"},
                {"densify", "F = sum(w f) / max(1, sum(w)), Gaussian w, cut at 5 sigma"},
                {"simd_backend", std::string(simd::backend_name(simd::active_backend()))}};
}

io::RunMetadata metadata_for(const std::string& command, const std::vector<std::string>& args) {
    io::RunMetadata meta;
    meta.command = command;
    meta.arguments = args;
    meta.constants = design_constants();
    return meta;
}

// ---------------------------------------------------------------- compose

bool looks_like_json(const std::string& path) {
    const std::string text = io::read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    return first != std::string::npos && text[first] == '{';
}

struct ComposeArgs {
    std::string depth, out, intrinsics, trajectory, mask, camera, camera_call, extrinsics, object_flow_dir;
    int frames = kDefaultFrames;
    std::string grid = "20x10";
    double sigma = kDefaultDensifySigma;
};

void run_compose(const ComposeArgs& a, bool frames_given, const std::vector<std::string>& args, std::ostream& out) {
    const DepthMap depth = io::read_depth(a.depth);
    const int w = depth.width();
    const int h = depth.height();
    io::RunMetadata meta = metadata_for("compose", args);
    meta.add_input(a.depth);

    std::string intrinsics_source;
    const Intrinsics K = load_intrinsics(a.intrinsics, w, h, intrinsics_source);
    if (!a.intrinsics.empty()) meta.add_input(a.intrinsics);
    const double d_max = depth.max_valid();
    require(d_max > 0.0, ErrorKind::invalid_argument, "depth map has no valid pixels");

    std::vector<Extrinsics> poses;
    CameraMotionSpec spec;
    int frames = a.frames;
    require(a.camera.empty() + a.camera_call.empty() + a.extrinsics.empty() >= 2, ErrorKind::usage,
            "give at most one of --camera, --camera-call, --extrinsics");
    // --camera takes either a motion spec (JSON) or an extrinsics file.
    std::string camera_json = a.camera;
    std::string extrinsics_path = a.extrinsics;
    if (!camera_json.empty() && !looks_like_json(camera_json)) std::swap(camera_json, extrinsics_path);
    if (!extrinsics_path.empty()) {
        poses = io::read_extrinsics(extrinsics_path);
        meta.add_input(extrinsics_path);
        require(!poses.empty(), ErrorKind::malformed, extrinsics_path + ": no poses");
        require(!frames_given || static_cast<int>(poses.size()) == frames, ErrorKind::usage,
                "--frames disagrees with the extrinsics file");
        frames = static_cast<int>(poses.size());
    } else {
        if (!camera_json.empty()) {
            spec = io::camera_spec_from_json(io::read_json(camera_json));
            meta.add_input(camera_json);
        } else if (!a.camera_call.empty()) {
            spec = agent::parse_action_call(a.camera_call).camera();
        }
        poses = generate_extrinsics(spec, d_max, frames);
    }

    std::vector<FlowField> object_flows;
    require(a.trajectory.empty() || a.object_flow_dir.empty(), ErrorKind::usage,
            "give at most one of --trajectory, --object-flow-dir");
    if (!a.object_flow_dir.empty()) {
        object_flows = read_flow_sequence(a.object_flow_dir);
        require(object_flows.size() == static_cast<std::size_t>(frames), ErrorKind::dimension_mismatch,
                "found " + std::to_string(object_flows.size()) + " object flows for " + std::to_string(frames) +
                    " frames");
    } else {
        std::optional<Mask> mask;
        if (!a.mask.empty()) {
            mask = io::read_mask(a.mask);
            meta.add_input(a.mask);
        }
        std::vector<std::vector<Eigen::Vector2d>> paths;
        if (!a.trajectory.empty()) {
            io::TrajectoryDocument doc = io::trajectory_document_from_json(io::read_json(a.trajectory));
            meta.add_input(a.trajectory);
            const auto [cols, rows] = parse_size(a.grid, "--grid");
            if (!doc.grid_given) {
                doc.cols = cols;
                doc.rows = rows;
            }
            for (const auto& control : io::resolve_control_points(doc, w, h)) {
                paths.push_back(interpolate(control, frames).positions);
            }
        }
        object_flows = densify_paths(paths, frames, w, h, mask, a.sigma);
    }

    const UnifiedFlow unified = compose_unified_flow({depth, K, object_flows, poses});
    const fs::path dir = a.out;
    write_flow_sequence(unified.flows, dir);
    io::write_extrinsics(poses, dir / "extrinsics.txt");

    meta.constants["intrinsics"] = io::to_json(K);
    meta.constants["intrinsics_source"] = intrinsics_source;
    meta.constants["max_depth"] = d_max;
    meta.constants["frames"] = frames;
    meta.constants["grid"] = a.grid;
    meta.constants["sigma"] = a.sigma;
    if (extrinsics_path.empty()) meta.constants["camera"] = io::to_json(spec);
    Json oob = Json::array();
    for (const auto& m : unified.out_of_frame) {
        std::size_t n = 0;
        for (const auto v : m.values()) n += v;
        oob.push_back(n);
    }
    meta.outputs = {{"flows", frames}, {"out_of_frame_pixels", oob}, {"extrinsics", "extrinsics.txt"}};
    io::write_json(meta.to_json(), dir / "metadata.json");
    out << "wrote " << frames << " flow maps to " << dir.string() << "\n";
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
    std::string flow, flow_dir, depth, depth_k, depth_dir, extrinsics, intrinsics, out, sample_out, unified_dir;
    int frame = -1;
    int max_points = 64;
    double nms_radius = 16.0;
    double tau = kDefaultReplaceThreshold;
    double sigma = kDefaultDensifySigma;
    bool recompose = false;
};

/// Directory mode processes flow_%04d.flo sequences; single mode (--flow) one
/// flow file against one pose.
void run_decompose(const DecomposeArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    io::RunMetadata meta = metadata_for("decompose", args);
    const bool single = !a.flow.empty();
    require(single != !a.flow_dir.empty(), ErrorKind::usage, "give exactly one of --flow, --flow-dir");
    const DepthMap depth0 = io::read_depth(a.depth);
    meta.add_input(a.depth);
    std::vector<Extrinsics> poses = io::read_extrinsics(a.extrinsics);
    meta.add_input(a.extrinsics);

    std::vector<FlowField> real;
    std::vector<DepthMap> depths;
    if (single) {
        require(!a.depth_k.empty(), ErrorKind::usage, "--flow needs --depthk");
        real.push_back(io::read_flo(a.flow));
        meta.add_input(a.flow);
        depths.push_back(io::read_depth(a.depth_k));
        meta.add_input(a.depth_k);
        if (a.frame >= 0) {
            require(static_cast<std::size_t>(a.frame) < poses.size(), ErrorKind::usage,
                    "--frame " + std::to_string(a.frame) + " but the camera file has " + std::to_string(poses.size()) +
                        " poses");
            poses = {poses[static_cast<std::size_t>(a.frame)]};
        }
        require(poses.size() == 1, ErrorKind::usage, "camera file has several poses; pick one with --frame");
    } else {
        require(!a.depth_dir.empty(), ErrorKind::usage, "--flow-dir needs --depth-dir");
        real = read_flow_sequence(a.flow_dir);
        require(poses.size() == real.size(), ErrorKind::dimension_mismatch,
                std::to_string(real.size()) + " flows vs " + std::to_string(poses.size()) + " extrinsics");
        depths = read_depth_sequence(a.depth_dir, real.size());
    }
    const int w = depth0.width();
    const int h = depth0.height();
    std::string intrinsics_source;
    const Intrinsics K = load_intrinsics(a.intrinsics, w, h, intrinsics_source);
    const ReplacementPolicy policy{a.tau};
    policy.validate();

    std::vector<FlowField> object(real.size());
    parallel_for(real.size(), [&](std::size_t k) {
        object[k] = remove_camera_flow({real[k], depth0, depths[k], poses[k], K});
    });
    const fs::path target = a.out;
    if (single) {
        io::write_flo(object[0], target);
    } else {
        write_flow_sequence(object, target);
    }

    std::vector<SparseMotion> samples;
    if (!a.sample_out.empty() || a.recompose) {
        samples.resize(object.size());
        parallel_for(object.size(), [&](std::size_t k) { samples[k] = sparse_sample(object[k], a.max_points, a.nms_radius); });
    }
    if (!a.sample_out.empty()) {
        if (single) {
            io::write_json(io::to_json(samples[0]), a.sample_out);
        } else {
            for (std::size_t k = 0; k < samples.size(); ++k) {
                io::write_json(io::to_json(samples[k]), fs::path(a.sample_out) / numbered("sparse", k, ".json"));
            }
        }
    }

    Json decisions = Json::array();
    if (a.recompose) {
        std::vector<FlowField> unified;
        if (!a.unified_dir.empty()) {
            require(!single, ErrorKind::usage, "--unified-dir needs --flow-dir");
            unified = read_flow_sequence(a.unified_dir);
            require(unified.size() == real.size(), ErrorKind::dimension_mismatch, "unified flow count differs");
        } else {
            std::vector<FlowField> dense(samples.size());
            parallel_for(samples.size(), [&](std::size_t k) { dense[k] = densify(samples[k], w, h, a.sigma); });
            unified = compose_unified_flow({depth0, K, dense, poses}).flows;
        }
        std::vector<FlowField> selected(real.size());
        for (std::size_t k = 0; k < real.size(); ++k) {
            const ReplacementDecision d = decide_replacement(unified[k], real[k], policy);
            selected[k] = d.source == FlowSource::unified ? unified[k] : real[k];
            decisions.push_back({{"frame", k},
                                 {"source", d.source == FlowSource::unified ? "unified" : "real"},
                                 {"mean_epe", std::isfinite(d.mean_epe) ? Json(d.mean_epe) : Json(nullptr)},
                                 {"pixels", d.pixels}});
        }
        if (single) {
            fs::path p = target;
            p.replace_filename(target.stem().string() + "_selected" + target.extension().string());
            io::write_flo(selected[0], p);
        } else {
            write_flow_sequence(selected, target / "selected");
        }
    }

    meta.constants["intrinsics"] = io::to_json(K);
    meta.constants["intrinsics_source"] = intrinsics_source;
    meta.constants["tau"] = a.tau;
    meta.constants["max_points"] = a.max_points;
    meta.constants["nms_radius"] = a.nms_radius;
    meta.constants["sigma"] = a.sigma;
    meta.constants["depth_interpolation"] = "frame-k depth, bilinear in inverse depth";
    meta.outputs = {{"object_flows", object.size()}, {"replacement", decisions}};
    const fs::path meta_path =
        single ? target.parent_path() / (target.stem().string() + ".metadata.json") : target / "metadata.json";
    io::write_json(meta.to_json(), meta_path);
    out << "wrote " << object.size() << " object flow map(s) to " << target.string() << "\n";
}

// ---------------------------------------------------------------- preview

struct PreviewArgs {
    std::string image, flow_dir, out, depth, gif;
    bool fill_holes = false;
    int delay = 8;
};

void run_preview(const PreviewArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    io::RunMetadata meta = metadata_for("preview", args);
    const RgbImage source = io::read_png_rgb(a.image);
    meta.add_input(a.image);
    const std::vector<FlowField> flows = read_flow_sequence(a.flow_dir);
    for (const auto& f : flows) {
        require(f.width() == source.width() && f.height() == source.height(), ErrorKind::dimension_mismatch,
                "flow size does not match the image");
    }
    Grid<double> proxy;
    if (!a.depth.empty()) {
        const DepthMap depth = io::read_depth(a.depth);
        meta.add_input(a.depth);
        require(depth.width() == source.width() && depth.height() == source.height(), ErrorKind::dimension_mismatch,
                "depth size does not match the image");
        proxy = Grid<double>(depth.width(), depth.height());
        for (std::size_t i = 0; i < proxy.size(); ++i) {
            const double d = depth.values()[i];
            proxy[i] = DepthMap::is_valid_depth(d) ? d : std::numeric_limits<double>::infinity();
        }
    }
    std::vector<Frame> frames(flows.size());
    parallel_for(flows.size(), [&](std::size_t k) { frames[k] = forward_warp(source, flows[k], proxy, {a.fill_holes}); });
    write_frames(frames, a.out);
    if (!a.gif.empty()) {
        std::vector<RgbImage> images;
        for (const auto& f : frames) images.push_back(f.rgb);
        io::write_gif(images, a.gif, a.delay);
    }
    Json holes = Json::array();
    for (const auto& f : frames) holes.push_back(hole_fraction(f));
    meta.constants["splat"] = "nearest pixel, smaller depth proxy wins, ties in row-major order";
    meta.constants["fill_holes"] = a.fill_holes;
    meta.outputs = {{"frames", frames.size()}, {"hole_fraction", holes}};
    io::write_json(meta.to_json(), fs::path(a.out) / "metadata.json");
    out << "wrote " << frames.size() << " frames to " << a.out << "\n";
}

// ---------------------------------------------------------------- traj parse

void run_traj_parse(const std::string& call, const std::string& grid_text, const std::string& size_text,
                    std::ostream& out) {
    const auto [cols, rows] = parse_size(grid_text, "--grid");
    const agent::AgentAction action = agent::parse_action_call(call);
    require(!action.is_camera(), ErrorKind::unknown_function, "expected a Set_N_Points call");
    io::TrajectoryDocument doc;
    doc.cols = cols;
    doc.rows = rows;
    doc.trajectories.push_back({action.trajectory(), {}});
    Json j = io::to_json(doc);
    j["function"] = action.function_name;
    if (!size_text.empty()) {
        const auto [w, h] = parse_size(size_text, "--size");
        Json pixels = Json::array();
        const auto control = io::resolve_control_points(doc, w, h);
        for (const auto& p : control.front()) pixels.push_back({p.x(), p.y()});
        j["control_pixels"] = pixels;
    }
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- camera

struct CameraArgs {
    std::vector<std::string> calls;
    std::string spec, depth, out;
    double max_depth = 0.0;
    int frames = kDefaultFrames;
};

void run_camera(const CameraArgs& a, std::ostream& out) {
    require(!a.calls.empty() || !a.spec.empty(), ErrorKind::usage, "give --call or --spec");
    require(a.calls.empty() || a.spec.empty(), ErrorKind::usage, "give either --call or --spec");
    double d_max = a.max_depth;
    if (!a.depth.empty()) d_max = io::read_depth(a.depth).max_valid();
    require(d_max > 0.0, ErrorKind::usage, "give --depth or a positive --max-depth");
    std::vector<CameraSegment> segments;
    if (!a.spec.empty()) segments.push_back({io::camera_spec_from_json(io::read_json(a.spec)), a.frames});
    for (const auto& c : a.calls) {
        const agent::AgentAction action = agent::parse_action_call(c);
        require(action.is_camera(), ErrorKind::unknown_function, "expected Set_Camera_Motion, got " + action.function_name);
        segments.push_back({action.camera(), a.frames});
    }
    const std::vector<Extrinsics> poses = concat_segments(segments, d_max);
    if (a.out.empty()) {
        out << io::format_extrinsics(poses);
    } else {
        io::write_extrinsics(poses, a.out);
    }
}

// ---------------------------------------------------------------- agent run

struct AgentArgs {
    std::string image, depth, prompt, mask, start, backend, out, gif, templates, intrinsics;
    std::string model = "gpt-4o";
    std::string grid = "20x10";
    int frames = kDefaultFrames;
    int max_rethink_rounds = agent::kDefaultMaxRethinkRounds;
    int feedback_frames = agent::kDefaultFeedbackFrames;
    int identify_rounds = agent::kDefaultIdentifyRounds;
    double sigma = kDefaultDensifySigma;
    double timeout = 120.0;
    bool rethink = false;
};

void run_agent(const AgentArgs& a, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    io::RunMetadata meta = metadata_for("agent run", args);
    agent::PipelineInputs in;
    in.image = io::read_png_rgb(a.image);
    meta.add_input(a.image);
    in.depth = io::read_depth(a.depth);
    meta.add_input(a.depth);
    in.prompt = a.prompt;
    if (!a.mask.empty()) {
        in.mask = io::read_mask(a.mask);
        meta.add_input(a.mask);
    }
    if (!a.start.empty()) in.start_point = parse_point(a.start);
    std::string intrinsics_source;
    in.intrinsics = load_intrinsics(a.intrinsics, in.image.width(), in.image.height(), intrinsics_source);
    std::tie(in.grid_cols, in.grid_rows) = parse_size(a.grid, "--grid");
    in.frames = a.frames;
    in.sigma = a.sigma;
    in.rethink = a.rethink;
    in.max_rethink_rounds = a.max_rethink_rounds;
    in.feedback_frames = a.feedback_frames;
    in.identify_rounds = a.identify_rounds;

    const auto timeout = std::chrono::milliseconds(static_cast<long long>(a.timeout * 1000.0));
    const auto backend = agent::make_backend(a.backend, a.model, timeout);
    if (a.backend.starts_with("mock:")) meta.add_input(a.backend.substr(5));
    const agent::TemplateSet templates =
        a.templates.empty() ? agent::TemplateSet{} : agent::TemplateSet::from_directory(a.templates);

    const agent::PipelineResult r = agent::run_agent_pipeline(*backend, in, templates);
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";

    const fs::path dir = a.out;
    write_flow_sequence(r.unified.flows, dir);
    write_frames(r.preview, dir);
    io::write_extrinsics(r.extrinsics, dir / "extrinsics.txt");
    if (!a.gif.empty()) {
        std::vector<RgbImage> images;
        for (const auto& f : r.preview) images.push_back(f.rgb);
        io::write_gif(images, dir / a.gif);
    }
    Json actions = Json::object();
    if (r.trajectory_action) {
        io::TrajectoryDocument doc;
        doc.cols = in.grid_cols;
        doc.rows = in.grid_rows;
        doc.trajectories.push_back({r.trajectory_action->trajectory(), {}});
        io::write_json(io::to_json(doc), dir / "trajectory.json");
        actions["trajectory"] = r.trajectory_action->call_text();
        actions["initial_trajectory"] = r.initial_trajectory_action->call_text();
    }
    if (r.camera_action) {
        io::write_json(io::to_json(r.camera_action->camera()), dir / "camera.json");
        actions["camera"] = r.camera_action->call_text();
        actions["initial_camera"] = r.initial_camera_action->call_text();
    }
    Json transcript = Json::object();
    for (const auto& [name, state] : r.conversations) transcript[name] = state.to_json();
    io::write_json(transcript, dir / "transcript.json");

    meta.constants["intrinsics"] = io::to_json(r.intrinsics);
    meta.constants["intrinsics_source"] = intrinsics_source;
    meta.constants["max_depth"] = r.max_depth;
    meta.constants["frames"] = in.frames;
    meta.constants["grid"] = a.grid;
    meta.constants["sigma"] = in.sigma;
    meta.constants["max_rethink_rounds"] = in.max_rethink_rounds;
    meta.constants["feedback_frames"] = in.feedback_frames;
    meta.constants["backend"] = backend->describe();
    meta.outputs = {{"object_text", r.motion_text.object_text},
                    {"camera_text", r.motion_text.camera_text},
                    {"actions", actions},
                    {"rethink_rounds", r.rethink_rounds},
                    {"warnings", r.warnings}};
    if (r.start_point) meta.outputs["start_point"] = {r.start_point->x(), r.start_point->y()};
    io::write_json(meta.to_json(), dir / "metadata.json");
    out << "wrote " << r.unified.flows.size() << " flow maps and frames to " << dir.string() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Motion-field tools: flow composition, decomposition, previews and the planning agent", "motionfield"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::tool_version());
    std::string simd_backend;
    app.add_option("--simd", simd_backend, "Kernel backend: scalar or avx2 (default: best available)")
        ->check(CLI::IsMember({"scalar", "avx2"}));

    ComposeArgs ca;
    auto* compose = app.add_subcommand("compose", "Compose object and camera motion into unified flow maps");
    compose->add_option("--depth", ca.depth, "Frame-0 depth (.dpt or 16-bit PNG with sidecar)")->required();
    compose->add_option("--out", ca.out, "Output directory")->required();
    compose->add_option("--intrinsics", ca.intrinsics, "Intrinsics JSON");
    compose->add_option("--traj,--trajectory", ca.trajectory, "Trajectory JSON");
    compose->add_option("--object-flow-dir", ca.object_flow_dir, "Directory of object flow_%04d.flo");
    compose->add_option("--mask", ca.mask, "Object mask PNG (nonzero = object)");
    compose->add_option("--camera", ca.camera, "Camera motion JSON or extrinsics file");
    compose->add_option("--camera-call", ca.camera_call, "Set_Camera_Motion(...) call");
    compose->add_option("--extrinsics", ca.extrinsics, "Extrinsics file (overrides --frames)");
    auto* compose_frames = compose->add_option("--frames", ca.frames, "Frame count")->check(CLI::Range(2, 100000));
    compose->add_option("--grid", ca.grid, "Grid as COLSxROWS");
    compose->add_option("--sigma", ca.sigma, "Densify sigma in pixels")->check(CLI::PositiveNumber);

    DecomposeArgs da;
    auto* decompose = app.add_subcommand("decompose", "Remove camera motion from real flow");
    decompose->add_option("--flow", da.flow, "One real flow file (frame 0 -> k)");
    decompose->add_option("--flow-dir", da.flow_dir, "Directory of real flow_%04d.flo");
    decompose->add_option("--depth0,--depth", da.depth, "Frame-0 depth")->required();
    decompose->add_option("--depthk", da.depth_k, "Frame-k depth (with --flow)");
    decompose->add_option("--depth-dir", da.depth_dir, "Directory of per-frame depth_%04d.dpt|png (with --flow-dir)");
    decompose->add_option("--camera,--extrinsics", da.extrinsics, "Extrinsics file")->required();
    decompose->add_option("--frame", da.frame, "Pose line to use with --flow")->check(CLI::NonNegativeNumber);
    decompose->add_option("--out", da.out, "Output .flo (with --flow) or directory")->required();
    decompose->add_option("--intrinsics", da.intrinsics, "Intrinsics JSON");
    decompose->add_option("--sample-out", da.sample_out, "Write sparse anchors (JSON file or directory)");
    decompose->add_option("--max-points", da.max_points, "Anchors per frame")->check(CLI::Range(1, 1000000));
    decompose->add_option("--nms-radius", da.nms_radius, "Suppression radius in pixels")->check(CLI::NonNegativeNumber);
    decompose->add_flag("--recompose", da.recompose, "Re-compose from the anchors and pick unified or real flow");
    decompose->add_option("--unified-dir", da.unified_dir, "Use these unified flows instead of re-composing");
    decompose->add_option("--tau", da.tau, "Replacement threshold on mean EPE (pixels)")->check(CLI::PositiveNumber);
    decompose->add_option("--sigma", da.sigma, "Densify sigma in pixels")->check(CLI::PositiveNumber);

    PreviewArgs pa;
    auto* preview = app.add_subcommand("preview", "Forward-warp an image along flow maps");
    preview->add_option("--image", pa.image, "Source PNG")->required();
    preview->add_option("--flow-dir", pa.flow_dir, "Directory of flow_%04d.flo")->required();
    preview->add_option("--out", pa.out, "Output directory")->required();
    preview->add_option("--depth", pa.depth, "Frame-0 depth for occlusion order");
    preview->add_option("--gif", pa.gif, "Also write an animated GIF");
    preview->add_option("--delay", pa.delay, "GIF frame delay (1/100 s)")->check(CLI::Range(0, 65535));
    preview->add_flag("--fill-holes", pa.fill_holes, "Fill holes from the nearest rendered pixel");

    std::string traj_call, traj_grid = "20x10", traj_size;
    auto* traj = app.add_subcommand("traj", "Trajectory DSL tools");
    traj->require_subcommand(1);
    auto* traj_parse = traj->add_subcommand("parse", "Parse a Set_N_Points call to JSON");
    traj_parse->add_option("call", traj_call, "The call text")->required();
    traj_parse->add_option("--grid", traj_grid, "Grid as COLSxROWS");
    traj_parse->add_option("--size", traj_size, "Image size WxH; adds control-point pixels");

    CameraArgs cam;
    auto* camera = app.add_subcommand("camera", "Generate extrinsics from camera motion calls");
    camera->add_option("--call", cam.calls, "Set_Camera_Motion(...) call; repeat to chain segments");
    camera->add_option("--spec", cam.spec, "Camera motion JSON");
    camera->add_option("--depth", cam.depth, "Depth map supplying the translation scale");
    camera->add_option("--max-depth", cam.max_depth, "Translation scale");
    camera->add_option("--frames", cam.frames, "Frames per segment")->check(CLI::Range(2, 100000));
    camera->add_option("--out", cam.out, "Extrinsics file (default: stdout)");

    AgentArgs aa;
    auto* agent_cmd = app.add_subcommand("agent", "Planning agent");
    agent_cmd->require_subcommand(1);
    auto* agent_run = agent_cmd->add_subcommand("run", "Prompt to flow maps and preview frames");
    agent_run->add_option("--image", aa.image, "First frame PNG")->required();
    agent_run->add_option("--depth", aa.depth, "Frame-0 depth")->required();
    agent_run->add_option("--prompt", aa.prompt, "Motion description")->required();
    agent_run->add_option("--out", aa.out, "Output directory")->required();
    agent_run->add_option("--mask", aa.mask, "Object mask PNG");
    agent_run->add_option("--start", aa.start, "Object start point x,y");
    agent_run->add_option("--intrinsics", aa.intrinsics, "Intrinsics JSON");
    agent_run->add_option("--backend", aa.backend, "mock:<script> or an endpoint URL (default: $AGENT_ENDPOINT)");
    agent_run->add_option("--model", aa.model, "Model name sent to the endpoint");
    agent_run->add_option("--timeout", aa.timeout, "Request timeout in seconds")->check(CLI::PositiveNumber);
    agent_run->add_option("--templates", aa.templates, "Directory overriding prompt templates");
    agent_run->add_option("--frames", aa.frames, "Frame count")->check(CLI::Range(2, 100000));
    agent_run->add_option("--grid", aa.grid, "Grid as COLSxROWS");
    agent_run->add_option("--sigma", aa.sigma, "Densify sigma in pixels")->check(CLI::PositiveNumber);
    agent_run->add_flag("--rethink", aa.rethink, "Review the actions against the rendered preview");
    agent_run->add_option("--max-rethink-rounds", aa.max_rethink_rounds, "Rethinking cap")->check(CLI::Range(1, 100));
    agent_run->add_option("--feedback-frames", aa.feedback_frames, "Frames shown when rethinking")->check(CLI::Range(1, 1000));
    agent_run->add_option("--identify-rounds", aa.identify_rounds, "Start-point dialogue cap")->check(CLI::Range(1, 100));
    agent_run->add_option("--gif", aa.gif, "Also write an animated GIF (name inside --out)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (!simd_backend.empty()) {
            simd::set_backend(simd_backend == "avx2" ? simd::Backend::avx2 : simd::Backend::scalar);
        }
        if (compose->parsed()) {
            run_compose(ca, compose_frames->count() > 0, args, out);
        } else if (decompose->parsed()) {
            run_decompose(da, args, out);
        } else if (preview->parsed()) {
            run_preview(pa, args, out);
        } else if (traj_parse->parsed()) {
            run_traj_parse(traj_call, traj_grid, traj_size, out);
        } else if (camera->parsed()) {
            run_camera(cam, out);
        } else if (agent_run->parsed()) {
            run_agent(aa, args, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::usage ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace motionfield
