// SPDX-License-Identifier: Apache-2.0

#include "motionfield/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "motionfield/call_syntax.hpp"
#include "motionfield/error.hpp"

namespace motionfield {

namespace cs = call_syntax;

void GridSpec::validate() const {
    require(cols >= 1 && rows >= 1, ErrorKind::invalid_argument, "grid needs at least one column and row");
    require(width > 0 && height > 0, ErrorKind::invalid_argument, "grid image size must be positive");
}

std::optional<Subarea> parse_subarea(std::string_view text) {
    for (const Subarea s : kAllSubareas) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::string_view to_string(Subarea subarea) {
    switch (subarea) {
        case Subarea::top_left: return "top-left";
        case Subarea::top: return "top";
        case Subarea::top_right: return "top-right";
        case Subarea::left: return "left";
        case Subarea::center: return "center";
        case Subarea::right: return "right";
        case Subarea::bottom_left: return "bottom-left";
        case Subarea::bottom: return "bottom";
        case Subarea::bottom_right: return "bottom-right";
    }
    return "center";
}

void TrajectorySpec::validate() const {
    require(!points.empty() && points.size() <= 4, ErrorKind::arity_mismatch,
            "a trajectory has 1 to 4 points, got " + std::to_string(points.size()));
    for (const GridPoint& p : points) {
        require(p.area >= 0, ErrorKind::range_violation, "negative area label " + std::to_string(p.area));
    }
}

void TrajectorySpec::validate(const GridSpec& grid) const {
    validate();
    for (const GridPoint& p : points) {
        require(p.area < grid.area_count(), ErrorKind::range_violation,
                "area label " + std::to_string(p.area) + " outside [0, " + std::to_string(grid.area_count()) + ")");
    }
}

Eigen::Vector2d grid_point_to_pixel(const GridPoint& point, const GridSpec& grid) {
    grid.validate();
    require(point.area >= 0 && point.area < grid.area_count(), ErrorKind::range_violation,
            "area label " + std::to_string(point.area) + " outside [0, " + std::to_string(grid.area_count()) + ")");
    const int row = point.area / grid.cols;
    const int col = point.area % grid.cols;
    const int index = static_cast<int>(point.subarea);
    const int sub_col = index % 3;
    const int sub_row = index / 3;
    // width * (6 col + 2 sub_col + 1) / (6 cols): integers, so one rounding.
    const auto x_num = static_cast<double>(static_cast<long long>(grid.width) * (6 * col + 2 * sub_col + 1));
    const auto y_num = static_cast<double>(static_cast<long long>(grid.height) * (6 * row + 2 * sub_row + 1));
    return {x_num / (6.0 * grid.cols), y_num / (6.0 * grid.rows)};
}

GridPoint pixel_to_grid_point(const Eigen::Vector2d& pixel, const GridSpec& grid) {
    grid.validate();
    const double cw = grid.cell_width();
    const double ch = grid.cell_height();
    const double u = std::clamp(pixel.x(), 0.0, std::nextafter(static_cast<double>(grid.width), 0.0));
    const double v = std::clamp(pixel.y(), 0.0, std::nextafter(static_cast<double>(grid.height), 0.0));
    const int col = std::min(static_cast<int>(u / cw), grid.cols - 1);
    const int row = std::min(static_cast<int>(v / ch), grid.rows - 1);
    const int sub_col = std::min(static_cast<int>((u - col * cw) / (cw / 3.0)), 2);
    const int sub_row = std::min(static_cast<int>((v - row * ch) / (ch / 3.0)), 2);
    return {row * grid.cols + col, static_cast<Subarea>(sub_row * 3 + sub_col)};
}

// ---------------------------------------------------------------------------
// Set_N_Points parsing

namespace {

int points_numeral(const std::string& name) {
    constexpr std::string_view prefix = "Set_";
    constexpr std::string_view suffix = "_Points";
    const std::string_view n(name);
    if (n.size() == prefix.size() + 1 + suffix.size() && n.starts_with(prefix) && n.ends_with(suffix)) {
        const char digit = n[prefix.size()];
        if (digit >= '1' && digit <= '4') return digit - '0';
    }
    fail(ErrorKind::unknown_function, "unknown function '" + name + "'");
}

std::vector<std::string> expected_roles(int count) {
    switch (count) {
        case 1: return {"start"};
        case 2: return {"start", "end"};
        case 3: return {"start", "mid", "end"};
        default: return {"start", "mid_1", "mid_2", "end"};
    }
}

int parse_area(std::string_view text) {
    const auto value = cs::parse_integer(cs::unquote(text));
    require(value.has_value(), ErrorKind::malformed, "area must be an integer, got '" + std::string(text) + "'");
    require(*value >= 0 && *value <= 1'000'000, ErrorKind::range_violation,
            "area label out of range: " + std::string(text));
    return static_cast<int>(*value);
}

Subarea parse_subarea_literal(std::string_view text) {
    const std::string_view literal = cs::unquote(text);
    const auto s = parse_subarea(literal);
    require(s.has_value(), ErrorKind::invalid_literal, "unknown subarea '" + std::string(literal) + "'");
    return *s;
}

struct PartialPoint {
    std::optional<int> area;
    std::optional<Subarea> subarea;
};

void set_once(std::map<std::string, PartialPoint>& roles, const std::string& role, std::optional<int> area,
              std::optional<Subarea> subarea) {
    PartialPoint& p = roles[role];
    if (area) {
        require(!p.area, ErrorKind::malformed, "duplicate area for '" + role + "'");
        p.area = area;
    }
    if (subarea) {
        require(!p.subarea, ErrorKind::malformed, "duplicate subarea for '" + role + "'");
        p.subarea = subarea;
    }
}

std::map<std::string, PartialPoint> parse_keyword_form(std::string_view args) {
    std::map<std::string, PartialPoint> roles;
    for (const std::string_view raw : cs::split(args, ',')) {
        if (cs::trim(raw).empty()) continue;
        const auto kv = cs::split_key_value(raw);
        require(kv.has_value(), ErrorKind::malformed, "expected key: value, got '" + std::string(cs::trim(raw)) + "'");
        const std::string key(kv->first);
        if (key.ends_with("_subarea")) {
            set_once(roles, key.substr(0, key.size() - 8), std::nullopt, parse_subarea_literal(kv->second));
        } else if (key.ends_with("_area")) {
            set_once(roles, key.substr(0, key.size() - 5), parse_area(kv->second), std::nullopt);
        } else {
            fail(ErrorKind::malformed, "unexpected argument '" + key + "'");
        }
    }
    return roles;
}

std::map<std::string, PartialPoint> parse_semicolon_form(std::string_view args) {
    std::map<std::string, PartialPoint> roles;
    const auto entries = cs::split(args, ';');
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string_view entry = cs::trim(entries[i]);
        if (entry.empty() && i + 1 == entries.size() && i > 0) continue;  // trailing ';'
        const auto kv = cs::split_key_value(entry);
        require(kv.has_value(), ErrorKind::malformed, "expected role: area, subarea, got '" + std::string(entry) + "'");
        const auto fields = cs::split(kv->second, ',');
        require(fields.size() == 2, ErrorKind::malformed,
                "expected 'area, subarea' for '" + std::string(kv->first) + "'");
        const std::string role(kv->first);
        require(!roles.contains(role), ErrorKind::malformed, "duplicate point '" + role + "'");
        set_once(roles, role, parse_area(fields[0]), parse_subarea_literal(fields[1]));
    }
    return roles;
}

bool is_known_role(const std::string& role) {
    return role == "start" || role == "end" || role == "mid" || role == "mid_1" || role == "mid_2";
}

}  // namespace

TrajectorySpec parse_set_points(std::string_view text) {
    const cs::FunctionCall call = cs::parse_call(text);
    const int count = points_numeral(call.name);
    const std::string_view args = cs::trim(call.arguments);
    require(!args.empty(), ErrorKind::arity_mismatch, call.name + " called without points");

    const bool keyword_form = args.find("_area") != std::string_view::npos;
    const auto roles = keyword_form ? parse_keyword_form(args) : parse_semicolon_form(args);

    for (const auto& [role, point] : roles) {
        require(is_known_role(role), ErrorKind::malformed, "unknown point role '" + role + "'");
        require(point.area.has_value(), ErrorKind::malformed, "missing area for '" + role + "'");
        require(point.subarea.has_value(), ErrorKind::malformed, "missing subarea for '" + role + "'");
    }
    require(roles.size() == static_cast<std::size_t>(count), ErrorKind::arity_mismatch,
            call.name + " expects " + std::to_string(count) + " point(s), got " + std::to_string(roles.size()));

    std::vector<std::string> order = expected_roles(count);
    if (count == 3 && !roles.contains("mid") && roles.contains("mid_1")) {
        order[1] = "mid_1";
    }
    TrajectorySpec spec;
    for (const std::string& role : order) {
        const auto it = roles.find(role);
        require(it != roles.end(), ErrorKind::arity_mismatch, call.name + " is missing point '" + role + "'");
        spec.points.push_back({*it->second.area, *it->second.subarea});
    }
    spec.validate();
    return spec;
}

std::string format_set_points(const TrajectorySpec& spec) {
    spec.validate();
    const std::vector<std::string> roles = expected_roles(static_cast<int>(spec.points.size()));
    std::string out = "Set_" + std::to_string(spec.points.size()) + "_Points (";
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        if (i > 0) out += "; ";
        out += roles[i] + ": " + std::to_string(spec.points[i].area) + ", " + std::string(to_string(spec.points[i].subarea));
    }
    out += ")";
    return out;
}

// ---------------------------------------------------------------------------
// Interpolation

namespace {

using Vec2 = Eigen::Vector2d;

/// One centripetal Catmull-Rom span between p1 and p2 (Barry-Goldman pyramid).
struct CentripetalSpan {
    Vec2 p0, p1, p2, p3;
    double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0;

    CentripetalSpan(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) : p0(a), p1(b), p2(c), p3(d) {
        t1 = t0 + std::sqrt((p1 - p0).norm());
        t2 = t1 + std::sqrt((p2 - p1).norm());
        t3 = t2 + std::sqrt((p3 - p2).norm());
    }

    /// s in [0, 1] maps to the span from p1 (s = 0) to p2 (s = 1).
    Vec2 at(double s) const {
        if (s <= 0.0) return p1;
        if (s >= 1.0) return p2;
        const double t = t1 + (t2 - t1) * s;
        const Vec2 a1 = ((t1 - t) * p0 + (t - t0) * p1) / (t1 - t0);
        const Vec2 a2 = ((t2 - t) * p1 + (t - t1) * p2) / (t2 - t1);
        const Vec2 a3 = ((t3 - t) * p2 + (t - t2) * p3) / (t3 - t2);
        const Vec2 b1 = ((t2 - t) * a1 + (t - t0) * a2) / (t2 - t0);
        const Vec2 b2 = ((t3 - t) * a2 + (t - t1) * a3) / (t3 - t1);
        return ((t2 - t) * b1 + (t - t1) * b2) / (t2 - t1);
    }
};

constexpr int kSamplesPerSpan = 512;

}  // namespace

PixelPath interpolate(std::span<const Eigen::Vector2d> control, int frame_count) {
    require(!control.empty() && control.size() <= 4, ErrorKind::invalid_argument,
            "interpolation takes 1 to 4 control points");
    require(frame_count >= 1, ErrorKind::invalid_argument, "frame count must be at least 1");
    for (const Vec2& p : control) {
        require(p.allFinite(), ErrorKind::invalid_argument, "non-finite control point");
    }

    std::vector<Vec2> pts;
    for (const Vec2& p : control) {
        if (pts.empty() || pts.back() != p) pts.push_back(p);
    }

    PixelPath path;
    path.positions.assign(static_cast<std::size_t>(frame_count), pts.front());
    if (pts.size() == 1 || frame_count == 1) {
        return path;
    }
    const double last = static_cast<double>(frame_count - 1);

    if (pts.size() == 2) {
        for (int k = 1; k + 1 < frame_count; ++k) {
            path.positions[static_cast<std::size_t>(k)] = pts[0] + (k / last) * (pts[1] - pts[0]);
        }
        path.positions.back() = pts[1];
        return path;
    }

    std::vector<Vec2> ext;
    ext.reserve(pts.size() + 2);
    ext.push_back(2.0 * pts[0] - pts[1]);
    ext.insert(ext.end(), pts.begin(), pts.end());
    ext.push_back(2.0 * pts[pts.size() - 1] - pts[pts.size() - 2]);

    std::vector<CentripetalSpan> spans;
    for (std::size_t i = 0; i + 3 < ext.size(); ++i) {
        spans.emplace_back(ext[i], ext[i + 1], ext[i + 2], ext[i + 3]);
    }

    // Arc-length table over a dense polyline of the curve.
    const std::size_t samples = spans.size() * kSamplesPerSpan;
    std::vector<double> arc(samples + 1, 0.0);
    Vec2 prev = spans.front().at(0.0);
    for (std::size_t j = 1; j <= samples; ++j) {
        const std::size_t span = std::min((j - 1) / kSamplesPerSpan, spans.size() - 1);
        const double s = static_cast<double>(j - span * kSamplesPerSpan) / kSamplesPerSpan;
        const Vec2 cur = spans[span].at(s);
        arc[j] = arc[j - 1] + (cur - prev).norm();
        prev = cur;
    }
    const double total = arc.back();

    for (int k = 1; k + 1 < frame_count; ++k) {
        const double target = total * (k / last);
        const auto it = std::lower_bound(arc.begin() + 1, arc.end(), target);
        const std::size_t j = static_cast<std::size_t>(std::distance(arc.begin(), it));
        const double seg = arc[j] - arc[j - 1];
        const double frac = seg > 0.0 ? (target - arc[j - 1]) / seg : 0.0;
        const double global = (static_cast<double>(j - 1) + frac) / kSamplesPerSpan;
        const std::size_t span = std::min(static_cast<std::size_t>(global), spans.size() - 1);
        path.positions[static_cast<std::size_t>(k)] = spans[span].at(global - static_cast<double>(span));
    }
    path.positions.back() = pts.back();
    return path;
}

// ---------------------------------------------------------------------------
// Debug overlay

namespace {

// 3 x 5 bitmap digits, one row per nibble (bit 2 = leftmost column).
constexpr std::array<std::array<std::uint8_t, 5>, 10> kDigits = {{
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
}};

void put(RgbImage& img, int x, int y, const Rgb& c) {
    if (img.contains(x, y)) img(x, y) = c;
}

void draw_label(RgbImage& img, int x0, int y0, int label, int scale) {
    const std::string text = std::to_string(label);
    const int w = static_cast<int>(text.size()) * 4 * scale + scale;
    const int h = 7 * scale;
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) put(img, x, y, {0, 0, 0});
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto& glyph = kDigits[static_cast<std::size_t>(text[i] - '0')];
        const int gx = x0 + scale + static_cast<int>(i) * 4 * scale;
        for (int r = 0; r < 5; ++r) {
            for (int c = 0; c < 3; ++c) {
                if ((glyph[static_cast<std::size_t>(r)] >> (2 - c)) & 1) {
                    for (int dy = 0; dy < scale; ++dy) {
                        for (int dx = 0; dx < scale; ++dx) {
                            put(img, gx + c * scale + dx, y0 + scale + r * scale + dy, {255, 255, 255});
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

RgbImage render_grid_overlay(const RgbImage& image, const GridSpec& grid, const std::optional<Eigen::Vector2d>& start) {
    grid.validate();
    require(image.width() == grid.width && image.height() == grid.height, ErrorKind::dimension_mismatch,
            "overlay image does not match grid size");
    RgbImage out = image;
    const Rgb line{255, 220, 0};
    for (int c = 1; c < grid.cols; ++c) {
        const int x = static_cast<int>(std::lround(c * grid.cell_width()));
        for (int y = 0; y < grid.height; ++y) put(out, x, y, line);
    }
    for (int r = 1; r < grid.rows; ++r) {
        const int y = static_cast<int>(std::lround(r * grid.cell_height()));
        for (int x = 0; x < grid.width; ++x) put(out, x, y, line);
    }
    const int scale = std::max(1, static_cast<int>(grid.cell_height() / 40.0));
    for (int area = 0; area < grid.area_count(); ++area) {
        const int x = static_cast<int>(std::lround((area % grid.cols) * grid.cell_width())) + 1;
        const int y = static_cast<int>(std::lround((area / grid.cols) * grid.cell_height())) + 1;
        draw_label(out, x, y, area, scale);
    }
    if (start) draw_ring(out, *start, std::max(3.0, std::min(grid.cell_width(), grid.cell_height()) / 6.0), {255, 0, 0});
    return out;
}

void draw_ring(RgbImage& image, const Eigen::Vector2d& center, double radius, const Rgb& color) {
    const int x0 = static_cast<int>(std::floor(center.x() - radius - 1));
    const int y0 = static_cast<int>(std::floor(center.y() - radius - 1));
    for (int y = y0; y <= y0 + static_cast<int>(2 * radius) + 2; ++y) {
        for (int x = x0; x <= x0 + static_cast<int>(2 * radius) + 2; ++x) {
            const double d = std::hypot(x - center.x(), y - center.y());
            if (std::abs(d - radius) <= 1.0) put(image, x, y, color);
        }
    }
}

}  // namespace motionfield
