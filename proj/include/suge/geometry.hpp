#pragma once

#include <numbers>

namespace suge {

/// Gaze direction as (yaw, pitch) in radians.
struct GazeLabel {
    double yaw = 0.0;
    double pitch = 0.0;

    friend bool operator==(const GazeLabel&, const GazeLabel&) = default;
};

struct Direction3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// (-cos(pitch) sin(yaw), -sin(pitch), -cos(pitch) cos(yaw)). Throws InvalidInputError on non-finite input.
Direction3 gaze_to_3d(const GazeLabel& label);

/// Inverse of gaze_to_3d for any nonzero vector (normalized internally).
GazeLabel gaze_from_3d(const Direction3& dir);

/// Angle between the two gaze directions in degrees, in [0, 180].
double angular_distance_deg(const GazeLabel& a, const GazeLabel& b);

/// Mirror about the vertical plane: yaw negated, pitch kept.
constexpr GazeLabel flip_label(const GazeLabel& label) noexcept { return {-label.yaw, label.pitch}; }

// Componentwise arithmetic in angle space, used for label blending.
constexpr GazeLabel operator+(const GazeLabel& a, const GazeLabel& b) noexcept {
    return {a.yaw + b.yaw, a.pitch + b.pitch};
}
constexpr GazeLabel operator-(const GazeLabel& a, const GazeLabel& b) noexcept {
    return {a.yaw - b.yaw, a.pitch - b.pitch};
}
constexpr GazeLabel operator*(double s, const GazeLabel& a) noexcept { return {s * a.yaw, s * a.pitch}; }

}  // namespace suge
