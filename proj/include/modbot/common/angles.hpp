#pragma once

#include <numbers>

namespace modbot {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Mechanical range of every module joint: [-3pi/4, 3pi/4] rad.
inline constexpr double kJointLimit = 0.75 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double x) noexcept;

/// Clamps into the joint range; returns true when the value was modified.
bool clamp_to_joint_limit(double& q) noexcept;

}  // namespace modbot
