#include "modbot/common/angles.hpp"

#include <algorithm>
#include <cmath>

namespace modbot {

double wrap_angle(double x) noexcept {
  // std::remainder is exact and odd, so wrap(-x) == -wrap(x) off the branch.
  double y = std::remainder(x, kTwoPi);
  if (y <= -kPi) y += kTwoPi;
  return y;
}

bool clamp_to_joint_limit(double& q) noexcept {
  const double c = std::clamp(q, -kJointLimit, kJointLimit);
  const bool changed = c != q;
  q = c;
  return changed;
}

}  // namespace modbot
