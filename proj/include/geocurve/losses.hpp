#pragma once

// Training objective of the curve fit: a cosine similarity term between
// sampled and original pre-shapes plus a sorted 1D Wasserstein-1 term between
// the learnable sampling parameters and a uniform reference.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "geocurve/preshape.hpp"

namespace geocurve {

struct LossReport {
  double sim = 0.0;
  double diverg = 0.0;
  double total = 0.0;
  double beta = 0.0;
};

/// Column-wise inner products via the elementwise-product-and-reduce form,
/// summed top to bottom.
inline Vector column_inner_products(const Matrix& sampled, const Matrix& original) {
  const Matrix prod = sampled.cwiseProduct(original);
  Vector ips(prod.cols());
  for (Eigen::Index j = 0; j < prod.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < prod.rows(); ++i) s += prod(i, j);
    ips[j] = s;
  }
  return ips;
}

/// sqrt(sum_i (1 - <sampled_i, original_i>)^2). Columns are expected to be unit vectors.
inline double sim_loss(const Matrix& sampled, const Matrix& original) {
  if (sampled.rows() != original.rows() || sampled.cols() != original.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "sim_loss operands have shapes " + std::to_string(sampled.rows()) +
                                                  "x" + std::to_string(sampled.cols()) + " and " +
                                                  std::to_string(original.rows()) + "x" +
                                                  std::to_string(original.cols()));
  }
  const Vector ips = column_inner_products(sampled, original);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < ips.size(); ++j) {
    const double r = 1.0 - ips[j];
    acc += r * r;
  }
  return std::sqrt(acc);
}

/// Indices that sort `values` ascending; ties keep original order.
inline std::vector<std::size_t> sort_permutation(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return idx;
}

/// Mean absolute difference of the two sequences after sorting each ascending.
inline double divergence_loss(std::span<const double> t, std::span<const double> z) {
  if (t.size() != z.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "divergence_loss lengths " + std::to_string(t.size()) + " and " + std::to_string(z.size()));
  }
  if (t.empty()) throw Error(ErrorKind::EmptyInput, "divergence_loss needs at least one element");
  const auto pt = sort_permutation(t);
  const auto pz = sort_permutation(z);
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) acc += std::abs(t[pt[j]] - z[pz[j]]);
  return acc / static_cast<double>(t.size());
}

inline LossReport total_loss(double sim, double diverg, double beta) {
  if (!std::isfinite(sim) || !std::isfinite(diverg)) {
    throw Error(ErrorKind::NonFiniteLoss, "loss terms must be finite");
  }
  if (!(sim >= 0.0) || !(diverg >= 0.0) || !(beta >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "loss terms and beta must be nonnegative");
  }
  return LossReport{sim, diverg, sim + beta * diverg, beta};
}

}  // namespace geocurve
