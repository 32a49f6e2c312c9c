// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "corpus.hpp"
#include "motionfield/agent/agent.hpp"
#include "motionfield/camera_path.hpp"
#include "motionfield/cli.hpp"
#include "motionfield/flow_compose.hpp"
#include "motionfield/flow_decompose.hpp"
#include "motionfield/io/depth_io.hpp"
#include "motionfield/io/extrinsics_io.hpp"
#include "motionfield/io/file.hpp"
#include "motionfield/io/flo.hpp"
#include "motionfield/io/json_formats.hpp"
#include "motionfield/io/png.hpp"
#include "motionfield/trajectory.hpp"
#include "motionfield/warp_preview.hpp"
#include "scenes.hpp"

using namespace motionfield;
using namespace motionfield::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

int g_failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_seconds > 0 && secs >= limit_seconds) {
        o.ok = false;
        o.detail += " (over the " + std::to_string(limit_seconds) + " s budget)";
    }
    if (!o.ok) ++g_failures;
    std::printf("%s  %-28s %8.3f s  %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// ---------------------------------------------------------------- geometry

Outcome geometry_round_trip() {
    Rng rng(101);
    // 10k sub-pixel positions laid out as a 100 x 100 raster.
    const Intrinsics k(525.0, 515.0, 49.5, 50.25, 100, 100);
    const int n = 10000;
    PixelGrid px(100, 100);
    DepthMap depth(100, 100);
    for (int i = 0; i < n; ++i) {
        px.u[static_cast<std::size_t>(i)] = uniform(rng, -0.5, 99.5);
        px.v[static_cast<std::size_t>(i)] = uniform(rng, -0.5, 99.5);
        px.valid[static_cast<std::size_t>(i)] = 1;
        depth.values()[static_cast<std::size_t>(i)] = uniform(rng, 0.05, 200);
    }
    const PointGrid pts = unproject(px, depth, k);
    const PixelGrid back = project(pts, k);
    double worst_px = 0;
    for (int i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        if (back.valid[j] == 0) return {false, "pixel " + std::to_string(i) + " lost"};
        worst_px = std::max({worst_px, std::abs(back.u[j] - px.u[j]), std::abs(back.v[j] - px.v[j])});
    }

    double worst_pt = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Extrinsics e = random_extrinsics(rng, 3.0, 50.0);
        const PointGrid there = transform(pts, e);
        const PointGrid again = transform(there, e.inverse());
        for (std::size_t j = 0; j < pts.x.size(); ++j) {
            worst_pt = std::max({worst_pt, std::abs(again.x[j] - pts.x[j]), std::abs(again.y[j] - pts.y[j]),
                                 std::abs(again.z[j] - pts.z[j])});
        }
    }
    return {worst_px < 1e-9 && worst_pt < 1e-9, fmt("max pixel error %.2e, max point error %.2e", worst_px, worst_pt)};
}

// ---------------------------------------------------------------- analytic flow

Outcome analytic_rigid_flow() {
    // Zoom: camera moves t_z = 1 toward a plane at d = 10 with fx = 100.
    const Intrinsics k(100, 100, 50, 50, 100, 100);
    const DepthMap plane(100, 100, 10.0);
    CameraMotionSpec zoom;
    zoom.z_translation = 0.1;
    const Extrinsics ez = generate_extrinsics(zoom, 10.0, 2)[1];
    const FlowField fz = compose_frame(plane, k, FlowField(100, 100), ez);
    const double at10 = fz.du(60, 50);
    double worst_zoom = std::abs(at10 - 10.0 / 9.0);
    for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 100; ++x) {
            if (fz.valid(x, y) == 0) continue;
            worst_zoom = std::max({worst_zoom, std::abs(fz.du(x, y) - (x - 50.0) * 1.0 / 9.0),
                                   std::abs(fz.dv(x, y) - (y - 50.0) * 1.0 / 9.0)});
        }
    }

    // Pan across a 256 x 256 constant-depth plane.
    const Intrinsics kp = Intrinsics::default_for(256, 256);
    const double d = 8.0;
    const DepthMap wall(256, 256, d);
    CameraMotionSpec pan;
    pan.x_translation = 0.05;
    const double s = pan.x_translation * d;
    const Extrinsics ep = generate_extrinsics(pan, d, 2)[1];
    const FlowField fp = compose_frame(wall, kp, FlowField(256, 256), ep);
    double worst_pan = 0;
    std::size_t checked = 0;
    for (int y = 0; y < 256; ++y) {
        for (int x = 0; x < 256; ++x) {
            if (fp.valid(x, y) == 0) continue;
            ++checked;
            worst_pan = std::max({worst_pan, std::abs(fp.du(x, y) + kp.fx() * s / d), std::abs(fp.dv(x, y))});
        }
    }
    const bool ok = worst_zoom < 1e-6 && worst_pan < 1e-6 && checked == 256u * 256u;
    return {ok, fmt("zoom du(+10 px) = %.12f, max zoom error %.2e, max pan error %.2e", at10, worst_zoom, worst_pan)};
}

// ---------------------------------------------------------------- superposition

Outcome superposition() {
    Rng rng(303);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int w = uniform_int(rng, 16, 96), h = uniform_int(rng, 16, 96);
        DepthMap depth(w, h);
        for (std::size_t i = 0; i < depth.values().size(); ++i) depth.values()[i] = uniform(rng, 0.5, 50);
        std::vector<FlowField> obj;
        for (int f = 0; f < 4; ++f) obj.push_back(random_flow(rng, w, h, 20));
        const std::vector<Extrinsics> poses(4, Extrinsics::identity());
        const UnifiedFlow u = compose_unified_flow({depth, Intrinsics::default_for(w, h), obj, poses});
        for (int f = 0; f < 4; ++f) {
            for (std::size_t i = 0; i < obj[f].du.size(); ++i) {
                if (u.flows[f].valid[i] == 0) continue;
                worst = std::max(worst, std::hypot(u.flows[f].du[i] - obj[f].du[i], u.flows[f].dv[i] - obj[f].dv[i]));
            }
        }
    }
    return {worst < 1e-6, fmt("max deviation %.2e px over 20 trials", worst)};
}

// ---------------------------------------------------------------- round trip

Outcome round_trip() {
    double worst = 0, min_rate = 1;
    std::size_t qualifying = 0, total = 0;
    std::string lowest;
    const auto specs = round_trip_scenes();
    for (std::size_t si = 0; si < specs.size(); ++si) {
        const Scene s = build_scene(specs[si]);
        const UnifiedFlow u = compose_unified_flow({s.depth0, s.intrinsics, s.object_flows, s.poses});
        for (std::size_t f = 1; f < s.poses.size(); ++f) {
            const FrameOracle o = frame_oracle(s.depth0, s.intrinsics, u.flows[f], s.poses[f]);
            const FlowField rec = remove_camera_flow({u.flows[f], s.depth0, o.depth_k, s.poses[f], s.intrinsics});
            for (std::size_t i = 0; i < rec.du.size(); ++i) {
                if (o.qualifies[i] == 0) continue;
                if (rec.valid[i] == 0) return {false, "qualifying pixel marked invalid in scene " + std::to_string(si)};
                worst = std::max(worst, std::hypot(rec.du[i] - s.object_flows[f].du[i], rec.dv[i] - s.object_flows[f].dv[i]));
            }
            const double rate = static_cast<double>(o.qualifying) / static_cast<double>(rec.du.size());
            if (rate < min_rate) {
                min_rate = rate;
                lowest = "scene " + std::to_string(si) + " frame " + std::to_string(f);
            }
            qualifying += o.qualifying;
            total += rec.du.size();
        }
    }
    const double overall = static_cast<double>(qualifying) / static_cast<double>(total);
    return {worst < 1e-3 && min_rate >= 0.95,
            fmt("max EPE %.2e px, qualifying %.2f%% overall, %.2f%% lowest frame", worst, 100 * overall, 100 * min_rate) +
                " (" + lowest + ")"};
}

// ---------------------------------------------------------------- grid DSL

/// Exact rational position: width * (6 col + 2 j + 1) / (6 cols), found by scanning.
Eigen::Vector2d brute_force_pixel(int area, const std::string& subarea, int cols, int rows, int width, int height) {
    static const char* const names[3][3] = {{"top-left", "top", "top-right"},
                                            {"left", "center", "right"},
                                            {"bottom-left", "bottom", "bottom-right"}};
    int found_r = -1, found_c = -1, sr = -1, sc = -1;
    for (int r = 0, label = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c, ++label) {
            if (label == area) found_r = r, found_c = c;
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (subarea == names[i][j]) sr = i, sc = j;
        }
    }
    if (found_r < 0 || sr < 0) throw std::runtime_error("oracle: bad input");
    const long long xn = static_cast<long long>(width) * (6 * found_c + 2 * sc + 1);
    const long long yn = static_cast<long long>(height) * (6 * found_r + 2 * sr + 1);
    return {static_cast<double>(xn) / static_cast<double>(6LL * cols),
            static_cast<double>(yn) / static_cast<double>(6LL * rows)};
}

const std::vector<std::string>& malformed_calls() {
    static const std::vector<std::string> calls = {
        "Set_0_Points (start: 143, top-right; end: 33, bottom-right)",
        "Set_5_Points (start: 143, top-right; end: 33, bottom-right)",
        "Set_3_Points (start: 143, top-right; end: 33, bottom-right)",
        "Set_1_Points (start: 143, top-right; end: 33, bottom-right)",
        "Set_2_Points start: 143, top-right; end: 33, bottom-right",
        "Set_2_Points (start: 143, top-right; end: 33, bottom-right",
        "Set_2_Points start: 143, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 200, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: -1, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 1.5, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: abc, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-middle; end: 33, bottom-right)",
        "Set_2_Points (start: 143, ; end: 33, bottom-right)",
        "Set_2_Points (start: , top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143 top-right; end: 33, bottom-right)",
        "Set_2_Points (start 143, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right;; end: 33, bottom-right)",
        "Set_2_Points ()",
        "Set_2_Points",
        "Set_2_Points (start: 143, top-right, extra; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: 33, bottom-right, extra)",
        "Set_2_Points (start: 143, top-right; end: 33, bottom-right))",
        "Set_2_Points ((start: 143, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 1e3, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 0x8f, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top_right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: 33, bottom-rightt)",
        "Set_2_Points (start: 143, top-right; end: 33, bottom-right; end: 34, center)",
        "Set_2_Points (start: 99999999999999999999, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 14 3, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: 33, bottom-right) garbage",
        "Set-2-Points (start: 143, top-right; end: 33, bottom-right)",
        "Set_2_Points [start: 143, top-right; end: 33, bottom-right]",
        "Set_Two_Points (start: 143, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: 33)",
        "Set_2_Points (start: top-right, 143; end: 33, bottom-right)",
        "Set_2_Points (start: 143, \"top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143.0, top-right; end: 33, bottom-right)",
        "set_2_points (start: 143, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: 33, bottom-right, )",
        "Set_2_Points (start: 143, top-right: end: 33, bottom-right)",
        "Set_2_Points (start; 143, top-right; end: 33, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: -33, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: 33, bottom right)",
        "Set_2_Points (start: 143, top-right; end: 33.5, bottom-right)",
        "Set_2_Points (start: 143, top-right; end: NaN, bottom-right)",
        "Set_2_Points (start: 143, top-right; ; end: 33, bottom-right)",
        "Set_2_Points(start_area: 143, start_subarea: \"top-right\", end_area: 33)",
        "Set_2_Points(start_area: 143, start_subarea: \"top-right\", end_area: 330, end_subarea: \"bottom-right\")",
    };
    return calls;
}

Outcome grid_dsl() {
    const GridSpec grid{20, 10, 2560, 1600};
    Rng rng(505);
    int mismatches = 0, compared = 0;
    for (int i = 0; i < 200; ++i) {
        const int area = uniform_int(rng, 0, 199);
        for (const Subarea sub : kAllSubareas) {
            const Eigen::Vector2d got = grid_point_to_pixel({area, sub}, grid);
            const Eigen::Vector2d want = brute_force_pixel(area, std::string(to_string(sub)), 20, 10, 2560, 1600);
            ++compared;
            if (got.x() != want.x() || got.y() != want.y()) ++mismatches;
        }
    }

    const TrajectorySpec literal = parse_set_points("Set_2_Points (start: 143, top-right; end: 33, bottom-right)");
    literal.validate(grid);
    const bool literal_ok = literal == TrajectorySpec{{{143, Subarea::top_right}, {33, Subarea::bottom_right}}};

    int accepted = 0;
    std::string first_accepted;
    for (const auto& call : malformed_calls()) {
        try {
            parse_set_points(call).validate(grid);
            if (accepted++ == 0) first_accepted = call;
        } catch (const Error&) {
        }
    }
    const bool ok = mismatches == 0 && literal_ok && accepted == 0 && malformed_calls().size() == 50;
    std::string detail = std::to_string(compared - mismatches) + "/" + std::to_string(compared) +
                         " grid points exact, literal call " + (literal_ok ? "accepted" : "NOT accepted") + ", " +
                         std::to_string(malformed_calls().size() - accepted) + "/" +
                         std::to_string(malformed_calls().size()) + " malformed calls rejected";
    if (!first_accepted.empty()) detail += "; accepted: " + first_accepted;
    return {ok, detail};
}

// ---------------------------------------------------------------- pacing and paths

Outcome pacing_and_paths() {
    double worst_pacing = 0;
    for (const int k : {2, 3, 7, 24, 49}) {
        for (const MotionType t : {MotionType::uniform, MotionType::increment, MotionType::decrement}) {
            const PacingCurve c = pacing(t, k);
            for (int i = 0; i < k; ++i) {
                const double s = static_cast<double>(i) / (k - 1);
                const double want = t == MotionType::uniform ? s : t == MotionType::increment ? s * s : 1 - (1 - s) * (1 - s);
                worst_pacing = std::max(worst_pacing, std::abs(c.values[static_cast<std::size_t>(i)] - want));
            }
        }
    }

    CameraMotionSpec in, out;
    in.z_translation = 0.4;
    in.motion_type = MotionType::increment;
    out.z_translation = -0.4;
    out.motion_type = MotionType::decrement;
    const std::vector<CameraSegment> segs{{in, 12}, {out, 12}};
    const auto poses = concat_segments(segs, 7.0);
    const double back_home = poses.back().max_abs_difference(Extrinsics::identity());

    // Endpoint: every field set, compared with an axis-angle construction.
    CameraMotionSpec full;
    full.x_translation = 0.3;
    full.y_translation = -0.2;
    full.z_translation = 0.45;
    full.x_rotation = 20;
    full.y_rotation = 335;
    full.z_rotation = 12.5;
    full.motion_type = MotionType::decrement;
    const double d = 6.0;
    const auto path = generate_extrinsics(full, d, 24);
    const double deg = M_PI / 180;
    const Eigen::Matrix3d r = (Eigen::AngleAxisd(12.5 * deg, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(-25 * deg, Eigen::Vector3d::UnitY()) *
                               Eigen::AngleAxisd(20 * deg, Eigen::Vector3d::UnitX()))
                                  .toRotationMatrix();
    const Eigen::Vector3d c(0.3 * d, -0.2 * d, 0.45 * d);
    const Extrinsics want(r.transpose(), -r.transpose() * c);
    const double endpoint = path.back().max_abs_difference(want);

    return {worst_pacing < 1e-12 && back_home < 1e-9 && endpoint < 1e-9,
            fmt("pacing %.2e, zoom in/out residual %.2e, endpoint %.2e", worst_pacing, back_home, endpoint)};
}

// ---------------------------------------------------------------- warp

Outcome warp_identity_and_shift() {
    Rng rng(707);
    RgbImage src(97, 61);
    for (std::size_t i = 0; i < src.size(); ++i) {
        src[i] = {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
                  static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
    }
    const Frame same = forward_warp(src, FlowField(97, 61), {});
    const bool identity = same.rgb == src && hole_fraction(same) == 0.0;

    FlowField shift(97, 61);
    shift.du.fill(5.0);
    const Frame moved = forward_warp(src, shift, {});
    int wrong = 0, holes = 0;
    for (int y = 0; y < 61; ++y) {
        for (int x = 0; x < 97; ++x) {
            if (moved.hole_mask(x, y) != 0) {
                ++holes;
                wrong += x >= 5;
                continue;
            }
            wrong += x < 5 || !(moved.rgb(x, y) == src(x - 5, y));
        }
    }
    return {identity && wrong == 0 && holes == 5 * 61,
            std::string("identity ") + (identity ? "exact" : "differs") + ", shift mismatches " + std::to_string(wrong) +
                ", holes " + std::to_string(holes)};
}

// ---------------------------------------------------------------- files

Outcome file_formats() {
    TempDir dir("accept-io");
    Rng rng(909);
    FlowField f = random_flow(rng, 123, 77, 40);
    for (int i = 0; i < 50; ++i) f.valid[static_cast<std::size_t>(uniform_int(rng, 0, 123 * 77 - 1))] = 0;
    io::write_flo(f, dir / "a.flo");
    const io::Bytes first = io::read_file(dir / "a.flo");
    const FlowField g = io::read_flo(dir / "a.flo");
    io::write_flo(g, dir / "b.flo");
    const bool flo_exact = io::read_file(dir / "b.flo") == first && g.valid == f.valid;

    std::vector<Extrinsics> poses;
    for (int i = 0; i < 30; ++i) poses.push_back(random_extrinsics(rng, 3.0, 20.0));
    io::write_extrinsics(poses, dir / "cam.txt");
    const auto back = io::read_extrinsics(dir / "cam.txt");
    double worst = back.size() == poses.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; i < std::min(back.size(), poses.size()); ++i) worst = std::max(worst, back[i].max_abs_difference(poses[i]));

    int typed = 0;
    std::string bad;
    const auto corpus = malformed_corpus();
    for (const auto& c : corpus) {
        const auto kind = decode_kind(c);
        if (kind && *kind == c.expected) {
            ++typed;
        } else if (bad.empty()) {
            bad = c.name;
        }
    }
    const bool ok = flo_exact && worst < 1e-9 && typed == 10 && corpus.size() == 10;
    return {ok, std::string(".flo ") + (flo_exact ? "bit-identical" : "differs") + fmt(", poses within %.2e", worst) +
                    ", corpus " + std::to_string(typed) + "/" + std::to_string(corpus.size()) + " typed" +
                    (bad.empty() ? "" : " (first miss: " + bad + ")")};
}

// ---------------------------------------------------------------- agent

std::string agent_reply(const std::string& action) {
    return "Observation: a ball on a two-level floor.\nThought: follow the description.\nAction: " + action +
           "\nSummary: set.\n";
}

std::map<std::string, io::Bytes> snapshot(const fs::path& dir) {
    std::map<std::string, io::Bytes> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = io::read_file(e.path());
    }
    return files;
}

/// Random variations of valid calls, many pushed out of range or garbled.
std::string fuzz_case(Rng& rng) {
    enum class Field { translation, rotation, area };
    // Mostly plausible for the field, sometimes wild.
    auto number = [&](Field field) -> std::string {
        if (uniform(rng, 0, 1) < 0.85) {
            switch (field) {
                case Field::translation: return fmt("%.4f", uniform(rng, -0.9999, 0.9999));
                case Field::rotation: return fmt("%.3f", uniform(rng, 0, 359.999));
                case Field::area: return std::to_string(uniform_int(rng, 0, 199));
            }
        }
        switch (uniform_int(rng, 0, 9)) {
            case 0: return std::to_string(uniform_int(rng, -400, 800));
            case 1: return fmt("%.6f", uniform(rng, -2, 2));
            case 2: return fmt("%.3f", uniform(rng, -1.0001, 1.0001));
            case 3: return fmt("%.4f", uniform(rng, 355, 365));
            case 4: return fmt("%g", std::pow(10.0, uniform(rng, -300, 300)) * (uniform(rng, 0, 1) < 0.5 ? -1 : 1));
            case 5: return uniform(rng, 0, 1) < 0.5 ? "nan" : "-inf";
            case 6: return "1e400";
            case 7: return std::to_string(uniform_int(rng, 0, 199));
            case 8: return fmt("%.2f", uniform(rng, 0, 360));
            default: return fmt("%.3f", uniform(rng, -0.999, 0.999));
        }
    };
    static const std::vector<std::string> literals = {"uniform", "increment", "decrement", "uniform",  "increment",
                                                      "decrement", "bouncy", "Uniform", "", "linear"};
    static const std::vector<std::string> subs = {"top-left", "top",          "top-right", "left",      "center",
                                                  "right",    "bottom-left",  "bottom",    "bottom-right", "middle"};
    std::string call;
    if (uniform(rng, 0, 1) < 0.5) {
        const Field t = Field::translation, r = Field::rotation;
        call = "Set_Camera_Motion(x_translation: " + number(t) + ", y_translation: " + number(t) +
               ", z_translation: " + number(t) + ", x_rotation: " + number(r) + ", y_rotation: " + number(r) +
               ", z_rotation: " + number(r) + ", motion_type: " +
               literals[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(literals.size()) - 1))] + ")";
    } else {
        const int n = uniform(rng, 0, 1) < 0.8 ? uniform_int(rng, 1, 4) : uniform_int(rng, 0, 6);
        const int points = uniform(rng, 0, 1) < 0.8 ? n : uniform_int(rng, 0, 6);
        static const char* const labels[] = {"start", "mid", "mid_2", "mid_3", "mid_4", "end"};
        call = "Set_" + std::to_string(n) + "_Points (";
        for (int i = 0; i < points; ++i) {
            if (i > 0) call += "; ";
            const char* label = i == 0 ? "start" : i == points - 1 ? "end" : labels[std::min(i, 4)];
            call += std::string(label) + ": " + number(Field::area) + ", " +
                    subs[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(subs.size()) - 1))];
        }
        call += ")";
    }
    // Character-level damage.
    const int edits = uniform(rng, 0, 1) < 0.2 ? uniform_int(rng, 1, 3) : 0;
    static const std::string alphabet = "(),;:.-_ 0123456789eE\"abcxyz";
    for (int e = 0; e < edits && !call.empty(); ++e) {
        const auto pos = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(call.size()) - 1));
        const char c = alphabet[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(alphabet.size()) - 1))];
        switch (uniform_int(rng, 0, 2)) {
            case 0: call.erase(pos, 1); break;
            case 1: call.insert(pos, 1, c); break;
            default: call[pos] = c; break;
        }
    }
    return call;
}

/// Independent check of what downstream modules require.
bool within_invariants(const agent::AgentAction& a, const GridSpec& grid) {
    if (a.is_camera()) {
        const CameraMotionSpec& s = a.camera();
        for (const double t : {s.x_translation, s.y_translation, s.z_translation}) {
            if (!(std::isfinite(t) && t > -1.0 && t < 1.0)) return false;
        }
        for (const double r : {s.x_rotation, s.y_rotation, s.z_rotation}) {
            if (!(std::isfinite(r) && r >= 0.0 && r < 360.0)) return false;
        }
        const int m = static_cast<int>(s.motion_type);
        return a.function_name == "Set_Camera_Motion" && m >= 0 && m <= 2;
    }
    const auto& pts = a.trajectory().points;
    const std::string& name = a.function_name;
    if (name.size() != 12 || name.rfind("Set_", 0) != 0 || name.substr(5) != "_Points") return false;
    const int numeral = name[4] - '0';
    if (numeral < 1 || numeral > 4 || static_cast<int>(pts.size()) != numeral) return false;
    for (const auto& p : pts) {
        const int sub = static_cast<int>(p.subarea);
        if (p.area < 0 || p.area >= grid.cols * grid.rows || sub < 0 || sub > 8) return false;
    }
    return true;
}

Outcome agent_loop() {
    // 1. Deterministic `agent run --rethink` on a 64 x 64 scene.
    TempDir dir("accept-agent");
    RgbImage image = textured_image(64, 64);
    DepthMap depth(64, 64, 9.0);
    for (int y = 20; y < 44; ++y) {
        for (int x = 10; x < 34; ++x) depth(x, y) = 4.0;
    }
    io::write_png(image, dir / "image.png");
    io::write_depth_dpt(depth, dir / "depth.dpt");
    CameraMotionSpec cam;
    cam.z_translation = 0.3;
    CameraMotionSpec stronger = cam;
    stronger.z_translation = 0.8;
    const std::string traj = "Set_2_Points (start: 61, center; end: 66, center)";
    const std::string weak = agent::make_action(cam).call_text();
    const std::string strong = agent::make_action(stronger).call_text();
    const nlohmann::json script = {"Object: the ball rolls right\nCamera: the camera moves forward",
                                   agent_reply(traj),   agent_reply(weak),   agent_reply(traj),
                                   agent_reply(strong), agent_reply(traj),   agent_reply(strong)};
    io::write_text_atomic(dir / "script.json", script.dump(2));
    const fs::path out = dir / "run";
    const std::vector<std::string> args = {"agent",     "run",  "--image", (dir / "image.png").string(),
                                           "--depth",   (dir / "depth.dpt").string(),
                                           "--prompt",  "the ball rolls right while the camera moves forward",
                                           "--start",   "20,32", "--frames", "12", "--rethink", "--gif", "preview.gif",
                                           "--backend", "mock:" + (dir / "script.json").string(), "--out", out.string()};
    std::ostringstream o1, e1, o2, e2;
    const int c1 = run_cli(args, o1, e1);
    if (c1 != 0) return {false, "agent run failed: " + e1.str()};
    const auto first = snapshot(out);
    const int c2 = run_cli(args, o2, e2);
    if (c2 != 0) return {false, "second agent run failed: " + e2.str()};
    const auto second = snapshot(out);
    const bool deterministic = first == second && o1.str() == o2.str();
    const bool amplified = io::camera_spec_from_json(io::read_json(out / "camera.json")) == stronger;

    // 2. Fuzz: nothing out of range gets through.
    const GridSpec grid{20, 10, 2560, 1600};
    Rng rng(4242);
    int accepted = 0, violations = 0;
    std::string bad_case;
    for (int i = 0; i < 10000; ++i) {
        const std::string call = fuzz_case(rng);
        const std::string response = "Observation: x\nThought: y\nAction: " + call + "\nSummary: z";
        try {
            const agent::AgentAction a = agent::parse_action(response, grid);
            ++accepted;
            if (!within_invariants(a, grid)) {
                if (violations++ == 0) bad_case = call;
            }
        } catch (const Error&) {
        }
    }

    // 3. Rethinking amplifies z only.
    agent::MockBackend mock({agent_reply(strong)});
    agent::Agent agent(mock);
    agent::ConversationState state;
    const agent::AgentAction prior = agent::make_action(cam);
    const agent::AgentAction next = agent.rethink(state, prior, "the camera moves forward", {}, std::nullopt);
    CameraMotionSpec only_z = prior.camera();
    only_z.z_translation = next.camera().z_translation;
    const bool z_only = next.camera() == only_z && next.camera().z_translation == 0.8 && prior.camera().z_translation == 0.3;

    const bool ok = deterministic && amplified && violations == 0 && accepted > 0 && z_only;
    std::string detail = std::string("run ") + (deterministic ? "byte-identical" : "DIFFERS") + " over " +
                         std::to_string(first.size()) + " files, fuzz accepted " + std::to_string(accepted) +
                         "/10000 with " + std::to_string(violations) + " out of range, rethink " +
                         (z_only ? "changed z only" : "changed other fields");
    if (!amplified) detail += ", final camera not amplified";
    if (!bad_case.empty()) detail += "; e.g. " + bad_case;
    return {ok, detail};
}

}  // namespace

int main() {
    criterion("geometry round trip", 1.0, geometry_round_trip);
    criterion("analytic rigid flow", 5.0, analytic_rigid_flow);
    criterion("object-only superposition", 0, superposition);
    criterion("compose/decompose round trip", 30.0, round_trip);
    criterion("grid DSL", 0, grid_dsl);
    criterion("pacing and paths", 0, pacing_and_paths);
    criterion("warp identity and shift", 0, warp_identity_and_shift);
    criterion(".flo and extrinsics files", 0, file_formats);
    criterion("agent loop (mock backend)", 10.0, agent_loop);
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
