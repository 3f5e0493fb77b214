#pragma once

// Multi-seed evaluation harness: project train and test sets, optionally
// augment the training set, train a classifier and score it on the test set.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "geocurve/augment.hpp"
#include "geocurve/classify.hpp"

namespace geocurve {

enum class AugmentMethod { None, Faagc, Mixup };
enum class ClassifierKind { Knn, Linear };

inline std::string to_string(AugmentMethod m) {
  switch (m) {
    case AugmentMethod::None: return "none";
    case AugmentMethod::Faagc: return "faagc";
    case AugmentMethod::Mixup: return "mixup";
  }
  return "?";
}

inline std::string to_string(ClassifierKind c) { return c == ClassifierKind::Knn ? "knn" : "linear"; }

struct EvalConfig {
  AugmentMethod method = AugmentMethod::None;
  ClassifierKind classifier = ClassifierKind::Knn;
  std::size_t k = 5;
  /// Augmented samples per class; unset means n = m for each class.
  std::optional<std::size_t> n;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5};
  FitConfig fit;
  LinearHeadConfig head;
  /// Mixup partner pool; 0 = any class member.
  std::size_t mixup_neighbors = 0;
  int threads = 1;
};

struct EvalReport {
  AugmentMethod method = AugmentMethod::None;
  ClassifierKind classifier = ClassifierKind::Knn;
  std::size_t k = 0;
  std::optional<std::size_t> n;
  std::size_t m_min = 0;  // smallest training class size
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;
  double mean = 0.0;
  double stddev = 0.0;
  /// Euclidean k-NN on raw features; filled only for method none with k-NN.
  std::vector<double> raw_knn_accuracies;
  /// Number of curve fits run across all seeds.
  std::size_t curve_fits = 0;
};

inline std::pair<double, double> mean_and_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double s = 0.0;
  for (double x : xs) s += x;
  const double mean = s / static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return {mean, std::sqrt(acc / static_cast<double>(xs.size()))};
}

namespace detail {

struct SeedOutcome {
  double accuracy = 0.0;
  std::optional<double> raw_knn;
  std::size_t curve_fits = 0;
};

inline SeedOutcome evaluate_seed(const LabeledFeatureSet& train_raw, const LabeledFeatureSet& test_raw,
                                 const EvalConfig& cfg, std::uint64_t seed) {
  const LabeledFeatureSet train_ps = project_all(train_raw);
  const LabeledFeatureSet test_ps = project_all(test_raw);

  std::map<std::string, std::size_t> counts;
  for (const auto& label : train_raw.labels()) counts[label] = cfg.n.value_or(train_raw.count(label));

  SeedOutcome out;
  LabeledFeatureSet aug;
  if (cfg.method == AugmentMethod::Faagc) {
    FitConfig fc = cfg.fit;
    fc.seed = derive_seed(seed, hash_label("fit"));
    fc.threads = 1;
    const auto curves = fit_all_classes(train_raw, fc);
    out.curve_fits = curves.size();
    aug = augment_dataset(curves, counts, derive_seed(seed, hash_label("augment")));
  } else if (cfg.method == AugmentMethod::Mixup) {
    aug = mixup_dataset(train_ps, counts, derive_seed(seed, hash_label("mixup")), cfg.mixup_neighbors);
  }

  if (cfg.classifier == ClassifierKind::Knn) {
    const LabeledFeatureSet pool = merge(train_ps, aug);
    out.accuracy = accuracy(test_ps, [&](const Vector& x) {
      return knn_predict_with(pool, x, cfg.k, geodesic_coords_distance);
    });
    if (cfg.method == AugmentMethod::None) {
      out.raw_knn = accuracy(test_raw, [&](const Vector& x) {
        return knn_predict_with(train_raw, x, cfg.k, euclidean_distance);
      });
    }
  } else {
    Rng rng(derive_seed(seed, hash_label("head")));
    const LinearHead head = train_linear_head(train_ps, aug, cfg.head, rng);
    out.accuracy = accuracy(test_ps, [&](const Vector& x) { return head.predict(x); });
  }
  return out;
}

}  // namespace detail

/// Runs every seed (in parallel up to cfg.threads) and aggregates in seed order.
inline EvalReport evaluate(const LabeledFeatureSet& train_raw, const LabeledFeatureSet& test_raw,
                           const EvalConfig& cfg) {
  if (train_raw.empty()) throw Error(ErrorKind::EmptyTrainSet, "training set is empty");
  if (cfg.seeds.empty()) throw Error(ErrorKind::InvalidArgument, "at least one seed is required");
  if (cfg.k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (!test_raw.empty() && test_raw.dim() != train_raw.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "train and test feature dimensions differ");
  }
  const auto train_labels = train_raw.labels();
  for (const auto& label : test_raw.labels()) {
    if (!std::binary_search(train_labels.begin(), train_labels.end(), label)) {
      throw Error(ErrorKind::LabelMismatch, "test label '" + label + "' does not occur in the training set");
    }
  }

  std::vector<detail::SeedOutcome> outcomes(cfg.seeds.size());
  std::vector<std::string> failures(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        outcomes[i] = detail::evaluate_seed(train_raw, test_raw, cfg, cfg.seeds[i]);
      } catch (const std::exception& e) {
        failures[i] = "seed " + std::to_string(cfg.seeds[i]) + ": " + e.what();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, cfg.threads));
  if (n_threads == 1 || cfg.seeds.size() == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_threads, cfg.seeds.size()); ++w) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error(ErrorKind::FitFailure, f);
  }

  EvalReport r;
  r.method = cfg.method;
  r.classifier = cfg.classifier;
  r.k = cfg.k;
  r.n = cfg.n;
  r.seeds = cfg.seeds;
  r.m_min = train_raw.size();
  for (const auto& label : train_labels) r.m_min = std::min(r.m_min, train_raw.count(label));
  for (const auto& o : outcomes) {
    r.accuracies.push_back(o.accuracy);
    if (o.raw_knn) r.raw_knn_accuracies.push_back(*o.raw_knn);
    r.curve_fits += o.curve_fits;
  }
  std::tie(r.mean, r.stddev) = mean_and_stddev(r.accuracies);
  return r;
}

}  // namespace geocurve
