#pragma once

// Independent reference computations used by the self-check and the tests.
// None of these share code paths with the routines they verify.

#include <cmath>
#include <vector>

#include "geocurve/geodesic.hpp"

namespace geocurve::oracle {

/// Per-column loop form of the similarity loss.
inline double sim_loss_loop(const Matrix& sampled, const Matrix& original) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < sampled.cols(); ++j) {
    double ip = 0.0;
    for (Eigen::Index i = 0; i < sampled.rows(); ++i) ip += sampled(i, j) * original(i, j);
    acc += (1.0 - ip) * (1.0 - ip);
  }
  return std::sqrt(acc);
}

/// Geodesic distance from `p` to the closest of `grid` + 1 evenly spaced curve points.
inline double nearest_on_curve(const GeodesicCurve& curve, const PreShapeVector& p, int grid = 10000) {
  const Vector& a = curve.start().coords();
  const Vector& b = curve.end().coords();
  const double pa = a.dot(p.coords());
  const double pb = b.dot(p.coords());
  const double th = curve.theta();
  const double st = std::sin(th);
  double best_ip = -2.0;
  for (int k = 0; k <= grid; ++k) {
    const double z = static_cast<double>(k) / grid;
    const double ip = std::sin((1.0 - z) * th) / st * pa + std::sin(z * th) / st * pb;
    best_ip = std::max(best_ip, ip);
  }
  return std::acos(std::clamp(best_ip, -1.0, 1.0));
}

/// Curve position of an on-curve point, from its distance to the start.
inline double recover_z(const GeodesicCurve& curve, const PreShapeVector& p) {
  return geodesic_distance(curve.start(), p) / curve.theta();
}

/// |d(start, p) + d(p, end) - theta|.
inline double additivity_gap(const GeodesicCurve& curve, const PreShapeVector& p) {
  return std::abs(geodesic_distance(curve.start(), p) + geodesic_distance(p, curve.end()) - curve.theta());
}

}  // namespace geocurve::oracle
