#pragma once

// Great-circle curves between two pre-shapes.

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "geocurve/preshape.hpp"

namespace geocurve {

/// Smallest admissible angle between curve endpoints (and distance from pi).
inline constexpr double kThetaMin = 1e-4;

class GeodesicCurve {
 public:
  /// Validated constructor; throws DegenerateCurve for near-coincident or
  /// near-antipodal endpoints.
  static GeodesicCurve make(PreShapeVector tau_start, PreShapeVector tau_end, double theta_min = kThetaMin) {
    if (tau_start.dim() != tau_end.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "curve endpoints have different dimensions");
    }
    const double theta = geodesic_distance(tau_start, tau_end);
    if (theta < theta_min || theta > std::numbers::pi - theta_min) {
      throw Error(ErrorKind::DegenerateCurve, "endpoint angle " + std::to_string(theta) + " rad is outside [" +
                                                  std::to_string(theta_min) + ", pi - " +
                                                  std::to_string(theta_min) + "]");
    }
    return GeodesicCurve(std::move(tau_start), std::move(tau_end), theta);
  }

  const PreShapeVector& start() const noexcept { return start_; }
  const PreShapeVector& end() const noexcept { return end_; }
  double theta() const noexcept { return theta_; }
  Eigen::Index dim() const noexcept { return start_.dim(); }

 private:
  GeodesicCurve(PreShapeVector s, PreShapeVector e, double theta)
      : start_(std::move(s)), end_(std::move(e)), theta_(theta), sin_theta_(std::sin(theta)) {}

  friend PreShapeVector gamma(const GeodesicCurve&, double);
  friend PreShapeVector interp(const GeodesicCurve&, double);
  friend Matrix interp_batch(const GeodesicCurve&, std::span<const double>);

  PreShapeVector start_;
  PreShapeVector end_;
  double theta_;
  double sin_theta_;
};

inline GeodesicCurve make_curve(PreShapeVector tau_start, PreShapeVector tau_end) {
  return GeodesicCurve::make(std::move(tau_start), std::move(tau_end));
}

/// Arc-length parameterization, s in [0, theta].
inline PreShapeVector gamma(const GeodesicCurve& c, double s) {
  if (!(s >= 0.0 && s <= c.theta_)) {
    throw Error(ErrorKind::OutOfRange, "arc parameter " + std::to_string(s) + " outside [0, theta]");
  }
  const Vector& a = c.start_.coords();
  const Vector& b = c.end_.coords();
  Vector tangent = (b - a * std::cos(c.theta_)) / c.sin_theta_;
  return PreShapeVector::trusted(std::cos(s) * a + std::sin(s) * tangent);
}

/// Normalized slerp form, z in [0, 1].
inline PreShapeVector interp(const GeodesicCurve& c, double z) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "interpolation parameter " + std::to_string(z) + " outside [0, 1]");
  }
  const double wa = std::sin((1.0 - z) * c.theta_) / c.sin_theta_;
  const double wb = std::sin(z * c.theta_) / c.sin_theta_;
  return PreShapeVector::trusted(wa * c.start_.coords() + wb * c.end_.coords());
}

/// One column per entry of t; 2d x m.
inline Matrix interp_batch(const GeodesicCurve& c, std::span<const double> t) {
  for (double z : t) {
    if (!(z >= 0.0 && z <= 1.0)) {
      throw Error(ErrorKind::OutOfRange, "interpolation parameter " + std::to_string(z) + " outside [0, 1]");
    }
  }
  Matrix out(c.dim(), static_cast<Eigen::Index>(t.size()));
  const Vector& a = c.start_.coords();
  const Vector& b = c.end_.coords();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double wa = std::sin((1.0 - t[i]) * c.theta_) / c.sin_theta_;
    const double wb = std::sin(t[i] * c.theta_) / c.sin_theta_;
    out.col(static_cast<Eigen::Index>(i)) = wa * a + wb * b;
  }
  return out;
}

}  // namespace geocurve
