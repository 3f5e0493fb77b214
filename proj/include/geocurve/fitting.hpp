#pragma once

// Per-class geodesic curve fitting: pick two class members as raw endpoints,
// then jointly optimize the endpoints and per-sample curve positions with
// Adam so that the curve passes close to every projected class member while
// the positions stay close to U(0, 1).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "geocurve/dataset.hpp"
#include "geocurve/graddescent.hpp"
#include "geocurve/rng.hpp"

namespace geocurve {

struct FitConfig {
  double beta = 0.3;
  double lr_endpoints = 3e-4;
  double lr_t = 3e-3;
  int epochs = 2000;
  std::uint64_t seed = 0;
  double theta_min = kThetaMin;
  double perturb_sigma = 1e-2;
  bool early_stop = false;
  int threads = 1;

  void validate() const {
    if (!(lr_endpoints > 0.0) || !(lr_t > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rates must be > 0");
    if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
    if (!(beta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be >= 0");
    if (!(theta_min > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta_min must be > 0");
    if (!(perturb_sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "perturb_sigma must be > 0");
  }
};

inline constexpr int kMaxPerturbRetries = 16;

struct FitState {
  ParamSet params;
  AdamState adam;
  int epoch = 0;
  LossReport last_report;
  std::vector<double> loss_trace;
  std::vector<double> last_z;
  int reperturb_events = 0;
  std::vector<double> diverg_trace;
};

struct FittedCurve {
  std::string label;
  GeodesicCurve curve;
  LossReport final_loss;
  std::vector<double> loss_trace;
  int reperturb_events = 0;
  std::vector<double> diverg_trace;

  /// Divergence averaged over the last `window` epochs, each against its own z draw.
  double trailing_diverg(std::size_t window = 100) const {
    if (diverg_trace.empty()) return final_loss.diverg;
    const std::size_t k = std::min(window, diverg_trace.size());
    double acc = 0.0;
    for (std::size_t i = diverg_trace.size() - k; i < diverg_trace.size(); ++i) acc += diverg_trace[i];
    return acc / static_cast<double>(k);
  }
};

namespace detail {

inline bool endpoints_usable(const Vector& vs, const Vector& ve, double theta_min) {
  try {
    GeodesicCurve::make(project(vs), project(ve), theta_min);
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline double entry_stddev(const Vector& v) {
  const double mean = sum_ordered(v) / static_cast<double>(v.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += (v[i] - mean) * (v[i] - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Replaces v_end with a small Gaussian perturbation of v_start until the
/// pair spans a usable curve.
inline bool reperturb_end(ParamSet& p, const FitConfig& cfg, Rng& rng) {
  double sd = cfg.perturb_sigma * entry_stddev(p.v_start);
  if (!(sd > 0.0)) sd = cfg.perturb_sigma;
  for (int attempt = 0; attempt < kMaxPerturbRetries; ++attempt) {
    Vector candidate(p.v_start.size());
    for (Eigen::Index i = 0; i < candidate.size(); ++i) candidate[i] = p.v_start[i] + sd * standard_normal(rng);
    if (endpoints_usable(p.v_start, candidate, cfg.theta_min)) {
      p.v_end = std::move(candidate);
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Projected class members as the columns of a 2d x m matrix.
inline Matrix originals_matrix(const std::vector<Vector>& class_features) {
  if (class_features.empty()) throw Error(ErrorKind::EmptyInput, "class has no samples");
  const Eigen::Index d = class_features.front().size();
  Matrix out(2 * d, static_cast<Eigen::Index>(class_features.size()));
  for (std::size_t i = 0; i < class_features.size(); ++i) {
    if (class_features[i].size() != d) throw Error(ErrorKind::DimensionMismatch, "class samples differ in dimension");
    out.col(static_cast<Eigen::Index>(i)) = project(class_features[i]).coords();
  }
  return out;
}

inline FitState init_fit(const std::vector<Vector>& class_features, const FitConfig& config, Rng& rng) {
  config.validate();
  const std::size_t m = class_features.size();
  if (m == 0) throw Error(ErrorKind::EmptyInput, "cannot fit a curve to an empty class");

  FitState s;
  const std::size_t i = uniform_index(rng, m);
  s.params.v_start = class_features[i];
  if (m >= 2) {
    std::size_t j = uniform_index(rng, m - 1);
    if (j >= i) ++j;
    s.params.v_end = class_features[j];
  } else {
    s.params.v_end = s.params.v_start;
  }
  if (!detail::endpoints_usable(s.params.v_start, s.params.v_end, config.theta_min) &&
      !detail::reperturb_end(s.params, config, rng)) {
    throw Error(ErrorKind::InitFailure, "no usable endpoint pair after " + std::to_string(kMaxPerturbRetries) +
                                            " perturbation attempts");
  }

  s.params.t_raw.resize(static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < s.params.t_raw.size(); ++k) s.params.t_raw[k] = standard_normal(rng);
  s.adam = AdamState::zeros_like(s.params);
  return s;
}

/// One pass of sample z, forward, backward, Adam. Records the pre-update loss.
inline void fit_epoch(FitState& state, const Matrix& originals, const FitConfig& config, Rng& rng) {
  const auto m = static_cast<std::size_t>(originals.cols());
  state.last_z.resize(m);
  for (auto& z : state.last_z) z = uniform01(rng);

  ForwardCache cache;
  for (int attempt = 0;; ++attempt) {
    try {
      cache = forward(state.params, originals, state.last_z, config.beta, config.theta_min);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateCurve || attempt >= kMaxPerturbRetries ||
          !detail::reperturb_end(state.params, config, rng)) {
        throw;
      }
      ++state.reperturb_events;
    }
  }
  if (!std::isfinite(cache.report.total)) {
    throw Error(ErrorKind::NonFiniteLoss, "loss is " + std::to_string(cache.report.total) + " at epoch " +
                                              std::to_string(state.epoch) + " (sim " +
                                              std::to_string(cache.report.sim) + ", diverg " +
                                              std::to_string(cache.report.diverg) + ")");
  }
  const GradSet grads = backward(cache);
  adam_step(state.params, grads, state.adam, config.lr_endpoints, config.lr_t);
  ++state.epoch;
  state.last_report = cache.report;
  state.loss_trace.push_back(cache.report.total);
  state.diverg_trace.push_back(cache.report.diverg);
}

namespace detail {

/// Moving-average plateau test over the last two 100-epoch windows.
inline bool plateaued(const std::vector<double>& trace) {
  constexpr std::size_t window = 100;
  if (trace.size() < 2 * window) return false;
  double prev = 0.0, cur = 0.0;
  for (std::size_t k = 0; k < window; ++k) {
    prev += trace[trace.size() - 2 * window + k];
    cur += trace[trace.size() - window + k];
  }
  return (prev - cur) / static_cast<double>(window) < 1e-6;
}

}  // namespace detail

inline FittedCurve fit(const std::vector<Vector>& class_features, const FitConfig& config, Rng& rng,
                       std::string label = {}) {
  const Matrix originals = originals_matrix(class_features);
  FitState state = init_fit(class_features, config, rng);
  while (state.epoch < config.epochs) {
    fit_epoch(state, originals, config, rng);
    if (config.early_stop && detail::plateaued(state.loss_trace)) break;
  }

  ForwardCache last = forward(state.params, originals, state.last_z, config.beta, config.theta_min);
  FittedCurve out{std::move(label),
                  GeodesicCurve::make(PreShapeVector::trusted(last.tau_start), PreShapeVector::trusted(last.tau_end),
                                      config.theta_min),
                  last.report, std::move(state.loss_trace), state.reperturb_events,
                  std::move(state.diverg_trace)};
  return out;
}

/// Fits every class on its own RNG stream derived from (config.seed, label),
/// so results do not depend on iteration order or thread count.
inline std::map<std::string, FittedCurve> fit_all_classes(const std::map<std::string, std::vector<Vector>>& groups,
                                                          const FitConfig& config) {
  config.validate();
  std::vector<std::pair<std::string, const std::vector<Vector>*>> jobs;
  for (const auto& [label, feats] : groups) jobs.emplace_back(label, &feats);

  std::vector<std::optional<FittedCurve>> results(jobs.size());
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const auto& [label, feats] = jobs[k];
      try {
        Rng rng = stream_for(config.seed, label);
        results[k] = fit(*feats, config, rng, label);
      } catch (const std::exception& e) {
        failures[k] = "class '" + label + "': " + e.what();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, config.threads));
  if (n_threads == 1 || jobs.size() <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_threads, jobs.size()); ++w) pool.emplace_back(worker);
  }

  std::string message;
  for (const auto& f : failures) {
    if (f.empty()) continue;
    if (!message.empty()) message += "; ";
    message += f;
  }
  if (!message.empty()) throw Error(ErrorKind::FitFailure, message);

  std::map<std::string, FittedCurve> out;
  for (std::size_t k = 0; k < jobs.size(); ++k) out.emplace(jobs[k].first, std::move(*results[k]));
  return out;
}

inline std::map<std::string, FittedCurve> fit_all_classes(const LabeledFeatureSet& dataset,
                                                          const FitConfig& config) {
  return fit_all_classes(dataset.by_class(), config);
}

}  // namespace geocurve
