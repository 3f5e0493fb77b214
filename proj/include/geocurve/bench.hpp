#pragma once

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include "geocurve/evaluate.hpp"
#include "geocurve/synth.hpp"

namespace geocurve {

struct BenchResult {
  std::size_t m = 0;
  Eigen::Index d = 0;
  int epochs = 0;
  std::vector<double> seconds;
  double mean = 0.0;
  double min = 0.0;
  double stddev = 0.0;
  std::string hardware;
};

inline std::string hardware_string() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto pos = line.find(':');
      if (pos != std::string::npos) return line.substr(pos + 2);
    }
  }
  return "unknown";
}

/// Wall time of single-threaded single-class fits on synthetic geodesic data.
inline BenchResult bench_fit(std::size_t m, int d, int epochs, int repeats = 3, std::uint64_t seed = 0) {
  if (m < 1 || d < 4 || epochs < 1 || repeats < 1) {
    throw Error(ErrorKind::InvalidArgument, "bench needs m >= 1, d >= 4, epochs >= 1, repeats >= 1");
  }
  SynthConfig sc;
  sc.classes = 2;
  sc.per_class = static_cast<int>(m);
  sc.dim = d;
  sc.seed = seed;
  const auto groups = synthesize(sc).train.by_class();
  const auto& feats = groups.begin()->second;
  FitConfig fc;
  fc.epochs = epochs;
  fc.seed = seed;

  BenchResult r{m, d, epochs, {}, 0.0, 0.0, 0.0, hardware_string()};
  for (int k = 0; k < repeats; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const auto t0 = std::chrono::steady_clock::now();
    const FittedCurve fitted = fit(feats, fc, rng);
    r.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (!std::isfinite(fitted.final_loss.total)) throw Error(ErrorKind::NonFiniteLoss, "bench fit diverged");
  }
  std::tie(r.mean, r.stddev) = mean_and_stddev(r.seconds);
  r.min = *std::min_element(r.seconds.begin(), r.seconds.end());
  return r;
}

}  // namespace geocurve
