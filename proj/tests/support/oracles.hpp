#pragma once
// Reference computations written independently of the library: element-wise
// loops instead of the matrix operators, a separate RK4, brute-force wraps.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;

inline double wrap(double x) {
  double y = std::fmod(x + kPi, 2.0 * kPi);
  if (y < 0.0) y += 2.0 * kPi;
  y -= kPi;
  return y == -kPi ? kPi : y;
}

// theta_i = phi_i - phi_{i+1}
inline Vec differences(const Vec& phi) {
  Vec th(phi.size() - 1);
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) th[i] = phi[i] - phi[i + 1];
  return th;
}

// psi_1 = theta_1, psi_last = theta_last, psi_i = theta_{i-1} - theta_i between.
inline Vec psi_of(const Vec& th) {
  const std::size_t k = th.size();
  Vec psi(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (i == 0 || i + 1 == k) psi[i] = th[i];
    else psi[i] = th[i - 1] - th[i];
  }
  return psi;
}

// Solves psi = S theta for theta by substitution down the chain.
inline Vec theta_from_psi(const Vec& psi) {
  const std::size_t k = psi.size();
  Vec th(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (i == 0 || i + 1 == k) th[i] = psi[i];
    else th[i] = th[i - 1] - psi[i];
  }
  return th;
}

// Minimum-norm phi with phi_i - phi_{i+1} = v_i: cumulative sums, then
// remove the mean (the null space of the difference operator is the ones vector).
inline Vec min_norm_phases(const Vec& v) {
  Vec phi(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) phi[i + 1] = phi[i] - v[i];
  double mean = 0.0;
  for (double p : phi) mean += p;
  mean /= static_cast<double>(phi.size());
  for (double& p : phi) p -= mean;
  return phi;
}

// Phase rate by walking the chain: phases -> differences -> psi -> negative
// gradient of V -> difference rates -> phase rates.
inline Vec chained_phase_rate(const Vec& phi, const Vec& omega, const Vec& theta_des,
                              const Vec& mu) {
  const Vec psi = psi_of(differences(phi));
  const Vec psi_des = psi_of(theta_des);
  Vec psi_dot(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi_dot[i] = -2.0 * mu[i] * (psi[i] - psi_des[i]);
  const Vec theta_dot = theta_from_psi(psi_dot);
  Vec rate = min_norm_phases(theta_dot);
  for (std::size_t i = 0; i < rate.size(); ++i) rate[i] += omega[i];
  return rate;
}

inline double potential(const Vec& phi, const Vec& theta_des, const Vec& mu) {
  const Vec psi = psi_of(differences(phi));
  const Vec psi_des = psi_of(theta_des);
  double v = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) v += mu[i] * (psi[i] - psi_des[i]) * (psi[i] - psi_des[i]);
  return v;
}

template <class F>
Vec rk4(const F& f, const Vec& y, double dt) {
  auto axpy = [](const Vec& a, double s, const Vec& b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  const Vec k1 = f(y);
  const Vec k2 = f(axpy(y, 0.5 * dt, k1));
  const Vec k3 = f(axpy(y, 0.5 * dt, k2));
  const Vec k4 = f(axpy(y, dt, k3));
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

inline Vec uniform_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Critically damped response, r'' = a((a/4)(R - r) - r'), solved by hand.
inline double critically_damped(double r0, double v0, double target, double a, double t) {
  const double e0 = r0 - target;
  return target + std::exp(-0.5 * a * t) * (e0 + (0.5 * a * e0 + v0) * t);
}

}  // namespace oracle
