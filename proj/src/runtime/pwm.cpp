#include "modbot/runtime/pwm.hpp"

#include <algorithm>
#include <cmath>

#include "modbot/common/angles.hpp"

namespace modbot::runtime {

int pwm_map(double q) {
  if (std::isnan(q)) return kPulseCenterUs;
  const double clamped = std::clamp(q, -kJointLimit, kJointLimit);
  const double pulse = kPulseCenterUs + clamped * ((kPulseMaxUs - kPulseCenterUs) / kJointLimit);
  return std::clamp(static_cast<int>(std::lround(pulse)), kPulseMinUs, kPulseMaxUs);
}

ServoCommand to_servo_command(const transport::JointVector& q) {
  ServoCommand cmd;
  for (int k = 0; k < transport::kJoints; ++k) cmd.pulse_us[k] = pwm_map(q[k]);
  return cmd;
}

}  // namespace modbot::runtime
