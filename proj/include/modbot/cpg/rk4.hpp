#pragma once

namespace modbot::cpg {

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
template <class Vec, class Rhs>
Vec rk4_step(const Rhs& f, double t, const Vec& y, double dt) {
  const double half = 0.5 * dt;
  const Vec k1 = f(t, y);
  const Vec k2 = f(t + half, Vec(y + half * k1));
  const Vec k3 = f(t + half, Vec(y + half * k2));
  const Vec k4 = f(t + dt, Vec(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace modbot::cpg
