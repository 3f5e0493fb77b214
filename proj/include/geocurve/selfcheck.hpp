#pragma once

// Randomized property suites shared by `geocurve check` and the test binaries.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "geocurve/augment.hpp"
#include "geocurve/oracles.hpp"
#include "geocurve/synth.hpp"

namespace geocurve {

struct SuiteResult {
  std::string name;
  std::size_t instances = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

inline constexpr std::uint64_t kSelfCheckSeed = 0x5eed'2025ULL;

namespace gen {

inline Vector raw_feature(Rng& rng, Eigen::Index d) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = standard_normal(rng);
  return v;
}

inline PreShapeVector preshape(Rng& rng, Eigen::Index d) { return project(raw_feature(rng, d)); }

/// A curve of exactly angle `theta` through a random pre-shape.
inline GeodesicCurve curve_with_angle(Rng& rng, Eigen::Index d, double theta) {
  const PreShapeVector a = preshape(rng, d);
  Vector u = preshape(rng, d).coords();
  u -= a.coords() * a.coords().dot(u);
  u /= u.norm();
  return make_curve(a, PreShapeVector::trusted(std::cos(theta) * a.coords() + std::sin(theta) * u));
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace gen

namespace detail {

template <typename Body>
SuiteResult timed_suite(std::string name, double tolerance, Body&& body) {
  SuiteResult r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  const auto t0 = std::chrono::steady_clock::now();
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// gamma(z theta) against interp(z) on random curves.
inline SuiteResult check_slerp_equivalence(std::uint64_t seed = kSelfCheckSeed, std::size_t instances = 1000) {
  return detail::timed_suite("slerp_equivalence", 1e-10, [&](SuiteResult& r) {
    Rng rng(derive_seed(seed, 1));
    constexpr std::array<Eigen::Index, 4> dims{4, 16, 64, 256};
    for (std::size_t i = 0; i < instances; ++i) {
      const Eigen::Index d = dims[i % dims.size()];
      const GeodesicCurve c = gen::curve_with_angle(rng, d, gen::uniform(rng, 0.1, std::numbers::pi - 0.1));
      const double z = uniform01(rng);
      const double err = (gamma(c, z * c.theta()).coords() - interp(c, z).coords()).cwiseAbs().maxCoeff();
      r.max_error = std::max(r.max_error, err);
    }
    r.instances = instances;
    r.passed = r.max_error <= r.tolerance;
  });
}

/// Centering and unit norm after projection, plus shift/scale invariance.
inline SuiteResult check_projection(std::uint64_t seed = kSelfCheckSeed, std::size_t instances = 1000) {
  return detail::timed_suite("projection_invariants", 1e-12, [&](SuiteResult& r) {
    Rng rng(derive_seed(seed, 2));
    double invariance = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
      const auto d = static_cast<Eigen::Index>(2 + uniform_index(rng, 511));
      const Vector v = gen::raw_feature(rng, d) * gen::uniform(rng, 0.01, 100.0);
      const PreShapeVector p = project(v);
      const auto [mx, my] = detail::axis_means(p.coords());
      r.max_error = std::max({r.max_error, std::abs(mx), std::abs(my), std::abs(p.coords().norm() - 1.0)});
      const double a = gen::uniform(rng, 0.1, 10.0);
      const double b = gen::uniform(rng, -10.0, 10.0);
      const Vector moved = (a * v).array() + b;
      invariance = std::max(invariance, (project(moved).coords() - p.coords()).cwiseAbs().maxCoeff());
    }
    r.instances = instances;
    r.passed = r.max_error <= r.tolerance && invariance <= 1e-9;
    r.detail = "shift/scale max deviation " + std::to_string(invariance) + " (tol 1e-9)";
  });
}

/// Matrix-form similarity loss against the per-column loop.
inline SuiteResult check_loss_forms(std::uint64_t seed = kSelfCheckSeed, std::size_t instances = 200) {
  return detail::timed_suite("loss_form_agreement", 1e-12, [&](SuiteResult& r) {
    Rng rng(derive_seed(seed, 3));
    for (std::size_t i = 0; i < instances; ++i) {
      const auto m = static_cast<Eigen::Index>(1 + uniform_index(rng, 64));
      const auto d = static_cast<Eigen::Index>(2 + uniform_index(rng, 255));
      Matrix a(2 * d, m), b(2 * d, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        a.col(j) = gen::preshape(rng, d).coords();
        b.col(j) = gen::preshape(rng, d).coords();
      }
      const double matrix_form = sim_loss(a, b);
      const double loop_form = oracle::sim_loss_loop(a, b);
      const double rel = std::abs(matrix_form - loop_form) / std::max(std::abs(loop_form), 1e-300);
      r.max_error = std::max(r.max_error, rel);
    }
    r.instances = instances;
    r.passed = r.max_error <= r.tolerance;
  });
}

/// Gradient entry agreement: |a - f| <= max(1e-4 * max(|a|, |f|), 1e-8).
inline bool gradient_entry_ok(double analytic, double numeric) {
  return std::abs(analytic - numeric) <= std::max(1e-4 * std::max(std::abs(analytic), std::abs(numeric)), 1e-8);
}

/// One random fitting instance with the endpoint angle kept in [0.1, pi - 0.1].
struct GradientInstance {
  ParamSet params;
  Matrix originals;
  std::vector<double> z;
  double beta = 0.3;
};

inline GradientInstance random_gradient_instance(Rng& rng, Eigen::Index m, Eigen::Index d) {
  GradientInstance g;
  for (;;) {
    g.params.v_start = gen::raw_feature(rng, d);
    g.params.v_end = gen::raw_feature(rng, d);
    const double th = geodesic_distance(project(g.params.v_start), project(g.params.v_end));
    if (th >= 0.1 && th <= std::numbers::pi - 0.1) break;
  }
  g.params.t_raw.resize(m);
  g.originals.resize(2 * d, m);
  g.z.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    g.params.t_raw[i] = standard_normal(rng);
    g.originals.col(i) = gen::preshape(rng, d).coords();
    g.z[static_cast<std::size_t>(i)] = uniform01(rng);
  }
  return g;
}

inline SuiteResult check_gradients(std::uint64_t seed = kSelfCheckSeed, std::size_t instances = 100) {
  return detail::timed_suite("gradient_oracle", 1e-4, [&](SuiteResult& r) {
    Rng rng(derive_seed(seed, 4));
    std::size_t bad = 0;
    for (std::size_t i = 0; i < instances; ++i) {
      const auto m = static_cast<Eigen::Index>(2 + uniform_index(rng, 7));
      const auto d = static_cast<Eigen::Index>(4 + uniform_index(rng, 13));
      const GradientInstance g = random_gradient_instance(rng, m, d);
      const GradSet analytic = backward(forward(g.params, g.originals, g.z, g.beta));
      const GradSet numeric = finite_diff(g.params, g.originals, g.z, g.beta, 1e-5);
      auto compare = [&](const Vector& a, const Vector& f) {
        for (Eigen::Index k = 0; k < a.size(); ++k) {
          const double scale = std::max(std::abs(a[k]), std::abs(f[k]));
          if (scale > 1e-8) r.max_error = std::max(r.max_error, std::abs(a[k] - f[k]) / scale);
          if (!gradient_entry_ok(a[k], f[k])) ++bad;
        }
      };
      compare(analytic.d_v_start, numeric.d_v_start);
      compare(analytic.d_v_end, numeric.d_v_end);
      compare(analytic.d_t_raw, numeric.d_t_raw);
    }
    r.instances = instances;
    r.passed = bad == 0;
    r.detail = std::to_string(bad) + " entries outside tolerance (absolute floor 1e-8)";
  });
}

/// Samples along curves fitted to synthetic geodesic classes: additivity,
/// mean of recovered positions and a 10-bin uniformity check.
inline SuiteResult check_on_curve_sampling(std::uint64_t seed = kSelfCheckSeed, std::size_t total = 10000,
                                           int fit_epochs = 2000) {
  return detail::timed_suite("on_curve_sampling", 1e-9, [&](SuiteResult& r) {
    SynthConfig sc;
    sc.classes = 4;
    sc.per_class = 10;
    sc.dim = 16;
    sc.seed = seed;
    const SynthData data = synthesize(sc);
    FitConfig fc;
    fc.seed = seed;
    fc.epochs = fit_epochs;
    const auto curves = fit_all_classes(data.train, fc);
    const std::size_t per_class = total / curves.size();
    const LabeledFeatureSet aug = augment_dataset(curves, per_class, derive_seed(seed, 6));

    std::array<std::size_t, 10> bins{};
    double z_sum = 0.0;
    for (const auto& s : aug.samples) {
      const auto& curve = curves.at(s.label).curve;
      const PreShapeVector p = PreShapeVector::trusted(s.x);
      r.max_error = std::max(r.max_error, oracle::additivity_gap(curve, p));
      const double z = std::clamp(oracle::recover_z(curve, p), 0.0, 1.0);
      z_sum += z;
      ++bins[std::min<std::size_t>(9, static_cast<std::size_t>(z * 10.0))];
    }
    const double n = static_cast<double>(aug.size());
    const double z_mean = z_sum / n;
    double worst_bin = 0.0;
    for (auto b : bins) worst_bin = std::max(worst_bin, std::abs(static_cast<double>(b) - n / 10.0) / (n / 10.0));
    r.instances = aug.size();
    r.passed = r.max_error <= r.tolerance && std::abs(z_mean - 0.5) <= 0.02 && worst_bin <= 0.4;
    r.detail = "z mean " + std::to_string(z_mean) + ", worst bin deviation " + std::to_string(worst_bin);
  });
}

inline std::vector<SuiteResult> run_self_check(std::uint64_t seed = kSelfCheckSeed) {
  return {check_slerp_equivalence(seed), check_projection(seed), check_loss_forms(seed), check_gradients(seed),
          check_on_curve_sampling(seed)};
}

}  // namespace geocurve
