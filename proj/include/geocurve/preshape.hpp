#pragma once

// Pre-shape projection of raw feature vectors.
//
// A raw feature v in R^d is lifted to d landmark pairs (v_i, v_i), centered
// per coordinate axis and scaled to unit norm. The result lives on the unit
// sphere of centered configurations in R^{2d}. Vectors use the interleaved
// layout [x_1, y_1, ..., x_d, y_d].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geocurve/error.hpp"

namespace geocurve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Norms at or below this are treated as degenerate.
inline constexpr double kNormEps = 1e-12;

/// Tolerance for the pre-shape invariants.
inline constexpr double kPreShapeTol = 1e-12;

namespace detail {

inline double sum_ordered(const Vector& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

inline double dot_ordered(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_ordered(const Vector& v) { return std::sqrt(dot_ordered(v, v)); }

/// Per-axis means of an interleaved vector: (mean of x, mean of y).
inline std::pair<double, double> axis_means(const Vector& coords) {
  const Eigen::Index pairs = coords.size() / 2;
  double sx = 0.0, sy = 0.0;
  for (Eigen::Index i = 0; i < pairs; ++i) {
    sx += coords[2 * i];
    sy += coords[2 * i + 1];
  }
  return {sx / static_cast<double>(pairs), sy / static_cast<double>(pairs)};
}

}  // namespace detail

/// A raw feature vector of length d >= 2 with finite entries.
class RawFeature {
 public:
  explicit RawFeature(Vector values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw Error(ErrorKind::InvalidArgument,
                  "raw feature needs d >= 2, got d = " + std::to_string(values_.size()));
    }
    if (!values_.allFinite()) throw Error(ErrorKind::InvalidArgument, "raw feature has non-finite entries");
  }
  explicit RawFeature(std::span<const double> values)
      : RawFeature(Vector(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())))) {}
  RawFeature(std::initializer_list<double> values)
      : RawFeature(std::span<const double>(values.begin(), values.size())) {}

  Eigen::Index dim() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }

 private:
  Vector values_;
};

/// d coordinate pairs stored interleaved, length 2d.
class PairedVector {
 public:
  explicit PairedVector(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() % 2 != 0 || coords_.size() == 0) {
      throw Error(ErrorKind::InvalidArgument, "paired vector must have positive even length");
    }
  }

  Eigen::Index pairs() const noexcept { return coords_.size() / 2; }
  const Vector& coords() const noexcept { return coords_; }
  double x(Eigen::Index i) const { return coords_[2 * i]; }
  double y(Eigen::Index i) const { return coords_[2 * i + 1]; }

 private:
  Vector coords_;
};

/// A point on the pre-shape sphere: zero per-axis means and unit norm.
class PreShapeVector {
 public:
  /// Wraps coordinates after checking the invariants at `tol`.
  static PreShapeVector checked(Vector coords, double tol = kPreShapeTol) {
    if (coords.size() < 4 || coords.size() % 2 != 0) {
      throw Error(ErrorKind::InvalidArgument,
                  "pre-shape vector needs even length >= 4, got " + std::to_string(coords.size()));
    }
    if (!coords.allFinite()) throw Error(ErrorKind::InvalidArgument, "pre-shape vector has non-finite entries");
    const auto [mx, my] = detail::axis_means(coords);
    if (std::abs(mx) > tol || std::abs(my) > tol) {
      throw Error(ErrorKind::InvalidArgument, "pre-shape vector is not centered");
    }
    if (std::abs(detail::norm_ordered(coords) - 1.0) > tol) {
      throw Error(ErrorKind::InvalidArgument, "pre-shape vector is not unit norm");
    }
    return PreShapeVector(std::move(coords));
  }

  /// Wraps coordinates already known to satisfy the invariants up to rounding.
  static PreShapeVector trusted(Vector coords) { return PreShapeVector(std::move(coords)); }

  Eigen::Index dim() const noexcept { return coords_.size(); }
  Eigen::Index pairs() const noexcept { return coords_.size() / 2; }
  const Vector& coords() const noexcept { return coords_; }
  double operator[](Eigen::Index i) const { return coords_[i]; }

 private:
  explicit PreShapeVector(Vector coords) : coords_(std::move(coords)) {}
  Vector coords_;
};

inline PairedVector duplicate(const RawFeature& v) {
  Vector out(2 * v.dim());
  for (Eigen::Index i = 0; i < v.dim(); ++i) {
    out[2 * i] = v[i];
    out[2 * i + 1] = v[i];
  }
  return PairedVector(std::move(out));
}

inline PairedVector center(const PairedVector& p) {
  const auto [mx, my] = detail::axis_means(p.coords());
  Vector out = p.coords();
  for (Eigen::Index i = 0; i < p.pairs(); ++i) {
    out[2 * i] -= mx;
    out[2 * i + 1] -= my;
  }
  return PairedVector(std::move(out));
}

/// Scales to unit norm. Throws DegenerateVector when the norm is at or below kNormEps.
inline PreShapeVector normalize(const PairedVector& p) {
  const double n = detail::norm_ordered(p.coords());
  if (!(n > kNormEps)) {
    throw Error(ErrorKind::DegenerateVector, "cannot normalize vector with norm " + std::to_string(n));
  }
  return PreShapeVector::trusted(p.coords() / n);
}

inline PreShapeVector project(const RawFeature& v) { return normalize(center(duplicate(v))); }

inline PreShapeVector project(const Vector& v) { return project(RawFeature(v)); }

/// Great-circle distance in [0, pi].
///
/// Uses arccos of the clamped inner product away from the poles and the
/// equivalent chord form 2 asin(|a -+ b| / 2) near them, where arccos loses
/// half of the available digits.
inline double geodesic_distance(const PreShapeVector& a, const PreShapeVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "geodesic distance between dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  const double ip = detail::dot_ordered(a.coords(), b.coords());
  if (ip > 0.5) {
    const double chord = detail::norm_ordered(a.coords() - b.coords());
    return 2.0 * std::asin(std::min(1.0, chord / 2.0));
  }
  if (ip < -0.5) {
    const double chord = detail::norm_ordered(a.coords() + b.coords());
    return std::numbers::pi - 2.0 * std::asin(std::min(1.0, chord / 2.0));
  }
  return std::acos(std::clamp(ip, -1.0, 1.0));
}

}  // namespace geocurve
