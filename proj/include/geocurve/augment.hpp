#pragma once

// Feature augmentation: draw new pre-shapes along each class's fitted curve
// with pseudo-labels, plus a re-projected linear mixup baseline.

#include <map>
#include <string>
#include <vector>

#include "geocurve/fitting.hpp"

namespace geocurve {

/// n points interp(curve, z) with z ~ U(0, 1) i.i.d.
inline std::vector<PreShapeVector> sample_curve(const GeodesicCurve& curve, std::size_t n, Rng& rng) {
  std::vector<PreShapeVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(interp(curve, uniform01(rng)));
  return out;
}

/// Samples `counts[label]` points from each listed class's curve, each on its
/// own stream derived from (seed, label).
inline LabeledFeatureSet augment_dataset(const std::map<std::string, FittedCurve>& curves,
                                         const std::map<std::string, std::size_t>& counts, std::uint64_t seed) {
  LabeledFeatureSet out;
  for (const auto& [label, n] : counts) {
    const auto it = curves.find(label);
    if (it == curves.end()) throw Error(ErrorKind::MissingCurve, "no fitted curve for class '" + label + "'");
    Rng rng = stream_for(seed, label);
    for (auto& p : sample_curve(it->second.curve, n, rng)) out.add(label, p.coords(), true);
  }
  return out;
}

/// n samples for every class in the curve map.
inline LabeledFeatureSet augment_dataset(const std::map<std::string, FittedCurve>& curves, std::size_t n,
                                         std::uint64_t seed) {
  std::map<std::string, std::size_t> counts;
  for (const auto& [label, _] : curves) counts[label] = n;
  return augment_dataset(curves, counts, seed);
}

/// lambda * a + (1 - lambda) * b, re-centered and re-normalized.
inline PreShapeVector mix_pair(const PreShapeVector& a, const PreShapeVector& b, double lambda) {
  return normalize(center(PairedVector(lambda * a.coords() + (1.0 - lambda) * b.coords())));
}

/// Euclidean interpolation between two class members, pulled back onto the
/// pre-shape sphere. With `neighbors` > 0 the partner is drawn from the
/// anchor's nearest same-class members (SMOTE-style); 0 draws any other member.
inline std::vector<PreShapeVector> mixup_baseline(const std::vector<PreShapeVector>& members, std::size_t n,
                                                  Rng& rng, std::size_t neighbors = 0) {
  const std::size_t m = members.size();
  if (m < 2) throw Error(ErrorKind::TooFewSamples, "mixup needs at least 2 samples, got " + std::to_string(m));
  std::vector<PreShapeVector> out;
  out.reserve(n);
  while (out.size() < n) {
    const std::size_t i = uniform_index(rng, m);
    std::size_t j = 0;
    if (neighbors == 0 || neighbors >= m - 1) {
      j = uniform_index(rng, m - 1);
      if (j >= i) ++j;
    } else {
      std::vector<std::pair<double, std::size_t>> dist;
      for (std::size_t k = 0; k < m; ++k) {
        if (k != i) dist.emplace_back(geodesic_distance(members[i], members[k]), k);
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbors), dist.end());
      j = dist[uniform_index(rng, neighbors)].second;
    }
    const double lambda = uniform01(rng);
    try {
      out.push_back(mix_pair(members[i], members[j], lambda));
    } catch (const Error&) {
      // antipodal pair mixed at its midpoint; draw again
    }
  }
  return out;
}

/// Mixup within every class of a pre-shape set.
inline LabeledFeatureSet mixup_dataset(const LabeledFeatureSet& preshapes,
                                       const std::map<std::string, std::size_t>& counts, std::uint64_t seed,
                                       std::size_t neighbors = 0) {
  const auto groups = preshapes.by_class();
  LabeledFeatureSet out;
  for (const auto& [label, n] : counts) {
    const auto it = groups.find(label);
    if (it == groups.end()) throw Error(ErrorKind::TooFewSamples, "class '" + label + "' has no samples");
    std::vector<PreShapeVector> members;
    for (const auto& v : it->second) members.push_back(PreShapeVector::trusted(v));
    Rng rng = stream_for(seed, label);
    for (auto& p : mixup_baseline(members, n, rng, neighbors)) out.add(label, p.coords(), true);
  }
  return out;
}

}  // namespace geocurve
