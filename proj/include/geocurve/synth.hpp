#pragma once

// Synthetic raw features for desk-scale experiments.
//
// kind "geodesic": each class is a random great-circle arc on the centered
// unit sphere of R^d, near a shared anchor; samples are drawn uniformly along
// the arc plus tangent noise. With noise 0 every class projects exactly onto
// one pre-shape geodesic.
// kind "gaussian": each class is an isotropic blob around a mean on the same sphere.
//
// Every raw sample then gets a random positive scale and a constant offset,
// both of which projection removes.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "geocurve/dataset.hpp"
#include "geocurve/rng.hpp"

namespace geocurve {

enum class SynthKind { Gaussian, Geodesic };

struct SynthConfig {
  SynthKind kind = SynthKind::Geodesic;
  int classes = 10;
  int per_class = 5;
  int test_per_class = 0;
  int dim = 32;
  double noise = 0.0;
  /// How far class anchors spread from the shared anchor (larger = easier).
  double spread = 0.2;
  double arc_min = 0.6;
  double arc_max = 1.2;
  std::uint64_t seed = 0;

  void validate() const {
    if (classes < 2) throw Error(ErrorKind::InvalidArgument, "synth needs at least 2 classes");
    if (per_class < 1) throw Error(ErrorKind::InvalidArgument, "synth needs at least 1 sample per class");
    if (test_per_class < 0) throw Error(ErrorKind::InvalidArgument, "test_per_class must be >= 0");
    if (dim < 4) throw Error(ErrorKind::InvalidArgument, "synth needs dim >= 4");
    if (!(noise >= 0.0) || !(spread >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise and spread must be >= 0");
    if (!(arc_min > 0.0 && arc_max >= arc_min && arc_max < 3.0)) {
      throw Error(ErrorKind::InvalidArgument, "arc range must satisfy 0 < arc_min <= arc_max < 3");
    }
  }
};

struct SynthData {
  LabeledFeatureSet train;
  LabeledFeatureSet test;
};

namespace detail {

inline Vector gaussian_vector(Rng& rng, Eigen::Index d) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = standard_normal(rng);
  return v;
}

inline Vector remove_mean(Vector v) {
  const double mean = sum_ordered(v) / static_cast<double>(v.size());
  v.array() -= mean;
  return v;
}

inline Vector unit(const Vector& v) { return v / norm_ordered(v); }

/// Component of `v` that is centered and orthogonal to the unit vector `u`.
inline Vector tangent_part(const Vector& v, const Vector& u) {
  Vector c = remove_mean(v);
  return c - u * dot_ordered(c, u);
}

inline std::string class_name(int c, int classes) {
  const auto width = std::to_string(classes - 1).size();
  std::string digits = std::to_string(c);
  return "c" + std::string(width - digits.size(), '0') + digits;
}

struct ClassModel {
  Vector anchor;     // centered unit vector
  Vector direction;  // centered unit vector orthogonal to anchor
  double arc = 0.0;
};

inline Vector draw_sample(const ClassModel& cls, SynthKind kind, double noise, Rng& rng) {
  const Eigen::Index d = cls.anchor.size();
  Vector clean = cls.anchor;
  if (kind == SynthKind::Geodesic) {
    const double s = cls.arc * uniform01(rng);
    clean = std::cos(s) * cls.anchor + std::sin(s) * cls.direction;
  }
  Vector x = clean;
  if (noise > 0.0) {
    const Vector g = gaussian_vector(rng, d);
    x += noise * (kind == SynthKind::Geodesic ? tangent_part(g, clean) : remove_mean(g));
  }
  const double scale = 0.5 + 1.5 * uniform01(rng);
  const double offset = standard_normal(rng);
  return (scale * x).array() + offset;
}

}  // namespace detail

inline SynthData synthesize(const SynthConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = cfg.dim;
  Rng latent(derive_seed(cfg.seed, 0));
  const Vector shared = detail::unit(detail::remove_mean(detail::gaussian_vector(latent, d)));

  SynthData out;
  for (int c = 0; c < cfg.classes; ++c) {
    const std::string label = detail::class_name(c, cfg.classes);
    detail::ClassModel cls;
    const Vector jitter = detail::tangent_part(detail::gaussian_vector(latent, d), shared) / std::sqrt(double(d));
    cls.anchor = detail::unit(shared + cfg.spread * jitter);
    cls.direction = detail::unit(detail::tangent_part(detail::gaussian_vector(latent, d), cls.anchor));
    cls.arc = cfg.arc_min + (cfg.arc_max - cfg.arc_min) * uniform01(latent);

    Rng train_rng(derive_seed(cfg.seed, hash_label(label) + 1));
    for (int i = 0; i < cfg.per_class; ++i) out.train.add(label, detail::draw_sample(cls, cfg.kind, cfg.noise, train_rng));
    Rng test_rng(derive_seed(cfg.seed, hash_label(label) + 2));
    for (int i = 0; i < cfg.test_per_class; ++i) {
      out.test.add(label, detail::draw_sample(cls, cfg.kind, cfg.noise, test_rng));
    }
  }
  return out;
}

}  // namespace geocurve
