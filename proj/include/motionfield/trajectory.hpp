// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "motionfield/image.hpp"

namespace motionfield {

/// The image split into cols x rows labeled areas, labels row-major from the
/// top-left (label = row * cols + col).
struct GridSpec {
    int cols = 20;
    int rows = 10;
    int width = 0;
    int height = 0;

    void validate() const;
    int area_count() const noexcept { return cols * rows; }
    double cell_width() const noexcept { return static_cast<double>(width) / cols; }
    double cell_height() const noexcept { return static_cast<double>(height) / rows; }

    bool operator==(const GridSpec&) const = default;
};

/// Position inside an area's 3 x 3 subdivision.
enum class Subarea { top_left, top, top_right, left, center, right, bottom_left, bottom, bottom_right };

inline constexpr std::array<Subarea, 9> kAllSubareas = {
    Subarea::top_left, Subarea::top,         Subarea::top_right, Subarea::left,         Subarea::center,
    Subarea::right,    Subarea::bottom_left, Subarea::bottom,    Subarea::bottom_right,
};

std::optional<Subarea> parse_subarea(std::string_view text);
std::string_view to_string(Subarea subarea);

struct GridPoint {
    int area = 0;
    Subarea subarea = Subarea::center;

    bool operator==(const GridPoint&) const = default;
};

/// Control points of one Set_N_Points call, N in 1..4.
struct TrajectorySpec {
    std::vector<GridPoint> points;

    void validate() const;
    void validate(const GridSpec& grid) const;

    bool operator==(const TrajectorySpec&) const = default;
};

/// One pixel position per frame.
struct PixelPath {
    std::vector<Eigen::Vector2d> positions;
};

/// Center of the named 3 x 3 subcell of the labeled area.
Eigen::Vector2d grid_point_to_pixel(const GridPoint& point, const GridSpec& grid);

/// Area and subcell containing a pixel (clamped to the image).
GridPoint pixel_to_grid_point(const Eigen::Vector2d& pixel, const GridSpec& grid);

/// Accepts "Set_2_Points (start: 143, top-right; end: 33, bottom-right)" and the
/// keyword form "Set_3_Points(start_area: 1, start_subarea: \"top\", mid_area: ...)".
/// Set_4_Points takes start, mid_1, mid_2, end.
TrajectorySpec parse_set_points(std::string_view text);

/// Function-call rendering in the semicolon form.
std::string format_set_points(const TrajectorySpec& spec);

/// Per-frame positions along the control polygon: constant for one point,
/// linear for two, centripetal Catmull-Rom through all points for three or
/// more. Frames are spaced uniformly in arc length and the first/last frames
/// are exactly the first/last control points.
PixelPath interpolate(std::span<const Eigen::Vector2d> control, int frame_count);

/// Grid lines, area labels and an optional start marker drawn over the image.
RgbImage render_grid_overlay(const RgbImage& image, const GridSpec& grid,
                             const std::optional<Eigen::Vector2d>& start_point = std::nullopt);

/// One-pixel-wide circle outline; pixels outside the image are skipped.
void draw_ring(RgbImage& image, const Eigen::Vector2d& center, double radius, const Rgb& color);

}  // namespace motionfield
