#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "geocurve/preshape.hpp"

namespace geocurve {

struct LabeledSample {
  std::string label;
  Vector x;
  bool augmented = false;
};

/// Class-partitioned collection of raw or pre-shape vectors.
struct LabeledFeatureSet {
  std::vector<LabeledSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  Eigen::Index dim() const { return samples.empty() ? 0 : samples.front().x.size(); }

  void add(std::string label, Vector x, bool augmented = false) {
    samples.push_back(LabeledSample{std::move(label), std::move(x), augmented});
  }

  /// Distinct labels in lexicographic order.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& s : samples) out.push_back(s.label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Samples of each class, in file order.
  std::map<std::string, std::vector<Vector>> by_class() const {
    std::map<std::string, std::vector<Vector>> out;
    for (const auto& s : samples) out[s.label].push_back(s.x);
    return out;
  }

  std::size_t count(const std::string& label) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [&](const LabeledSample& s) { return s.label == label; }));
  }
};

/// Projects every member to pre-shape space, keeping labels and flags.
inline LabeledFeatureSet project_all(const LabeledFeatureSet& raw) {
  LabeledFeatureSet out;
  out.samples.reserve(raw.size());
  for (const auto& s : raw.samples) out.add(s.label, project(s.x).coords(), s.augmented);
  return out;
}

/// Appends every member of `extra`.
inline LabeledFeatureSet merge(LabeledFeatureSet a, const LabeledFeatureSet& extra) {
  a.samples.insert(a.samples.end(), extra.samples.begin(), extra.samples.end());
  return a;
}

}  // namespace geocurve
