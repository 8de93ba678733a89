#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fovstream {

// Gaze orientation reported by the headset, in degrees.
struct GazeAngles {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double timestamp_ms = 0.0;
};

// Field-of-view half-angles, stored as magnitudes in degrees.
// Each must lie in (0, 90) so the tangents are finite and positive.
struct FovSpec {
    double left_deg = 45.0;
    double right_deg = 45.0;
    double up_deg = 45.0;
    double down_deg = 45.0;

    void validate() const {
        for (double a : {left_deg, right_deg, up_deg, down_deg})
            if (!(a > 0.0 && a < 90.0))
                throw std::invalid_argument("FovSpec: angles must be in (0, 90) degrees");
    }
};

// Gaze point in game-frame pixel coordinates.
struct ScreenPoint {
    double x = 0.0;
    double y = 0.0;
};

// Gaze point in FSC-frame pixel coordinates.
struct FscPoint {
    double x = 0.0;
    double y = 0.0;
};

// 0-based macroblock indices in the QP grid.
struct MacroblockCoord {
    int mx = 0;
    int my = 0;
    bool operator==(const MacroblockCoord&) const = default;
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Projects gaze angles into game-frame pixels. Positive yaw moves the
// point left (toward x = 0), positive pitch moves it up (toward y = 0);
// the result is clamped to the frame. The tangent-plane model places
// yaw = +left at x = 0 and yaw = -right at x = width.
inline ScreenPoint project_gaze_to_screen(const GazeAngles& gaze, const FovSpec& fov,
                                          int width, int height) {
    fov.validate();
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("project_gaze_to_screen: dimensions must be positive");
    const double tl = std::tan(deg_to_rad(std::abs(fov.left_deg)));
    const double tr = std::tan(deg_to_rad(std::abs(fov.right_deg)));
    const double tu = std::tan(deg_to_rad(std::abs(fov.up_deg)));
    const double td = std::tan(deg_to_rad(std::abs(fov.down_deg)));
    double x = (tl - std::tan(deg_to_rad(gaze.yaw_deg))) * width / (tl + tr);
    double y = (tu - std::tan(deg_to_rad(gaze.pitch_deg))) * height / (tu + td);
    return {std::clamp(x, 0.0, static_cast<double>(width)),
            std::clamp(y, 0.0, static_cast<double>(height))};
}

// 16x16 encoding unit.
inline constexpr int kMacroblockSize = 16;

// Maps an FSC-frame point to its 0-based macroblock. Equivalent block
// partition to a 1-based ceil(x/16) convention: pixel x lands in
// 1-based block ceil((x+1)/16) == floor(x/16) + 1. A point exactly on
// the frame's far edge is clamped into the last block.
inline MacroblockCoord point_to_macroblock(const FscPoint& p, int fsc_width = 0,
                                           int fsc_height = 0) {
    int mx = static_cast<int>(std::floor(p.x / kMacroblockSize));
    int my = static_cast<int>(std::floor(p.y / kMacroblockSize));
    if (fsc_width > 0) mx = std::min(mx, (fsc_width + kMacroblockSize - 1) / kMacroblockSize - 1);
    if (fsc_height > 0) my = std::min(my, (fsc_height + kMacroblockSize - 1) / kMacroblockSize - 1);
    return {std::max(mx, 0), std::max(my, 0)};
}

}  // namespace fovstream
