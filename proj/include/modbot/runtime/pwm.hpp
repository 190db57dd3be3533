#pragma once

#include <array>

#include "modbot/transport/messages.hpp"

namespace modbot::runtime {

inline constexpr int kPulseMinUs = 500;
inline constexpr int kPulseCenterUs = 1500;
inline constexpr int kPulseMaxUs = 2500;

struct ServoCommand {
  std::array<int, transport::kJoints> pulse_us{};
};

/// Maps [-3pi/4, 3pi/4] rad linearly onto [500, 2500] us (the servo's full
/// 270 degree throw), rounding to the nearest microsecond and clamping.
int pwm_map(double q);

ServoCommand to_servo_command(const transport::JointVector& q);

}  // namespace modbot::runtime
