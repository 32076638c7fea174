#include "suge/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "suge/error.hpp"

namespace suge {

Direction3 gaze_to_3d(const GazeLabel& label) {
    if (!std::isfinite(label.yaw) || !std::isfinite(label.pitch)) {
        throw InvalidInputError("gaze_to_3d: non-finite gaze angle");
    }
    const double cp = std::cos(label.pitch);
    return {-cp * std::sin(label.yaw), -std::sin(label.pitch), -cp * std::cos(label.yaw)};
}

GazeLabel gaze_from_3d(const Direction3& dir) {
    const double norm = std::sqrt(dir.x * dir.x + dir.y * dir.y + dir.z * dir.z);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidInputError("gaze_from_3d: zero or non-finite direction");
    }
    const double y = std::clamp(-dir.y / norm, -1.0, 1.0);
    return {std::atan2(-dir.x, -dir.z), std::asin(y)};
}

double angular_distance_deg(const GazeLabel& a, const GazeLabel& b) {
    const Direction3 u = gaze_to_3d(a);
    const Direction3 v = gaze_to_3d(b);
    // atan2(|u x v|, u . v) equals arccos of the normalized dot product but stays
    // accurate near 0 and 180 degrees where arccos loses half the mantissa.
    const double cx = u.y * v.z - u.z * v.y;
    const double cy = u.z * v.x - u.x * v.z;
    const double cz = u.x * v.y - u.y * v.x;
    const double sine = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double cosine = u.x * v.x + u.y * v.y + u.z * v.z;
    return std::atan2(sine, cosine) * kRadToDeg;
}

}  // namespace suge
