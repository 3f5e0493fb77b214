#pragma once

// Downstream classifiers used to score augmentation: k-nearest neighbors
// under geodesic (or any supplied) distance, and a multinomial logistic head
// whose per-epoch loss mixes original and augmented data.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "geocurve/dataset.hpp"
#include "geocurve/rng.hpp"

namespace geocurve {

/// Majority label among the k nearest training members. Distance ties go to
/// the smaller sample index, vote ties to the smallest label.
template <typename Distance>
std::string knn_predict_with(const LabeledFeatureSet& train, const Vector& query, std::size_t k, Distance&& dist) {
  if (train.empty()) throw Error(ErrorKind::EmptyTrainSet, "k-NN training set is empty");
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) ranked.emplace_back(dist(train.samples[i].x, query), i);
  const std::size_t kk = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(kk), ranked.end());

  std::map<std::string, std::size_t> votes;
  for (std::size_t r = 0; r < kk; ++r) ++votes[train.samples[ranked[r].second].label];
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

inline double geodesic_coords_distance(const Vector& a, const Vector& b) {
  return geodesic_distance(PreShapeVector::trusted(a), PreShapeVector::trusted(b));
}

inline std::string knn_predict(const LabeledFeatureSet& train, const PreShapeVector& query, std::size_t k) {
  return knn_predict_with(train, query.coords(), k, geodesic_coords_distance);
}

inline double euclidean_distance(const Vector& a, const Vector& b) { return detail::norm_ordered(a - b); }

/// Fraction of `test` predicted correctly by `predict`.
template <typename Predict>
double accuracy(const LabeledFeatureSet& test, Predict&& predict) {
  if (test.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : test.samples) hits += predict(s.x) == s.label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

struct LinearHeadConfig {
  double p_g = 0.3;
  double lambda = 0.5;
  int epochs = 300;
  double lr = 0.05;
};

struct LinearHead {
  std::vector<std::string> classes;
  Matrix weights;  // classes x dim
  Vector bias;

  Vector logits(const Vector& x) const { return weights * x + bias; }

  std::string predict(const Vector& x) const {
    const Vector z = logits(x);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < z.size(); ++c) {
      if (z[c] > z[best]) best = c;
    }
    return classes[static_cast<std::size_t>(best)];
  }
};

namespace detail {

struct HeadBatch {
  Matrix x;  // dim x n
  std::vector<Eigen::Index> y;
};

inline HeadBatch make_batch(const LabeledFeatureSet& set, const std::map<std::string, Eigen::Index>& index) {
  HeadBatch b{Matrix(set.dim(), static_cast<Eigen::Index>(set.size())), {}};
  for (std::size_t i = 0; i < set.size(); ++i) {
    b.x.col(static_cast<Eigen::Index>(i)) = set.samples[i].x;
    b.y.push_back(index.at(set.samples[i].label));
  }
  return b;
}

/// Mean cross-entropy; accumulates `weight` times its gradient.
inline double cross_entropy(const LinearHead& head, const HeadBatch& batch, double weight, Matrix& g_w, Vector& g_b) {
  const auto n = batch.x.cols();
  if (n == 0) return 0.0;
  Matrix logits = head.weights * batch.x;
  logits.colwise() += head.bias;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto col = logits.col(i);
    const double mx = col.maxCoeff();
    Vector p = (col.array() - mx).exp();
    const double z = p.sum();
    p /= z;
    const Eigen::Index y = batch.y[static_cast<std::size_t>(i)];
    loss -= std::log(p[y]);
    p[y] -= 1.0;
    const double w = weight / static_cast<double>(n);
    g_w.noalias() += w * p * batch.x.col(i).transpose();
    g_b += w * p;
  }
  return loss / static_cast<double>(n);
}

}  // namespace detail

/// Trains weights with Adam from zero init. Each epoch draws one Bernoulli(p_g):
/// on success the loss is CE on `train_ps` alone, otherwise
/// CE(train_ps) + lambda * CE(train_aug).
inline LinearHead train_linear_head(const LabeledFeatureSet& train_ps, const LabeledFeatureSet& train_aug,
                                    const LinearHeadConfig& cfg, Rng& rng) {
  if (train_ps.empty()) throw Error(ErrorKind::EmptyTrainSet, "linear head training set is empty");
  if (!(cfg.p_g >= 0.0 && cfg.p_g <= 1.0)) throw Error(ErrorKind::InvalidArgument, "p_g must lie in [0, 1]");
  if (!(cfg.lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
  if (cfg.epochs < 1 || !(cfg.lr > 0.0)) throw Error(ErrorKind::InvalidArgument, "epochs and lr must be positive");

  LinearHead head;
  head.classes = train_ps.labels();
  std::map<std::string, Eigen::Index> index;
  for (std::size_t c = 0; c < head.classes.size(); ++c) index[head.classes[c]] = static_cast<Eigen::Index>(c);
  for (const auto& s : train_aug.samples) {
    if (!index.contains(s.label)) {
      throw Error(ErrorKind::LabelMismatch, "augmented label '" + s.label + "' is absent from the original set");
    }
  }
  if (!train_aug.empty() && train_aug.dim() != train_ps.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "augmented and original features differ in dimension");
  }

  const auto classes = static_cast<Eigen::Index>(head.classes.size());
  const Eigen::Index dim = train_ps.dim();
  head.weights = Matrix::Zero(classes, dim);
  head.bias = Vector::Zero(classes);
  const auto ps = detail::make_batch(train_ps, index);
  const auto aug = detail::make_batch(train_aug, index);

  Matrix m_w = Matrix::Zero(classes, dim), v_w = Matrix::Zero(classes, dim);
  Vector m_b = Vector::Zero(classes), v_b = Vector::Zero(classes);
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Matrix g_w = Matrix::Zero(classes, dim);
    Vector g_b = Vector::Zero(classes);
    detail::cross_entropy(head, ps, 1.0, g_w, g_b);
    const bool original_only = uniform01(rng) < cfg.p_g;
    if (!original_only && cfg.lambda > 0.0) detail::cross_entropy(head, aug, cfg.lambda, g_w, g_b);

    const double bc1 = 1.0 - std::pow(b1, epoch), bc2 = 1.0 - std::pow(b2, epoch);
    m_w = b1 * m_w + (1.0 - b1) * g_w;
    v_w = b2 * v_w + (1.0 - b2) * g_w.cwiseProduct(g_w);
    m_b = b1 * m_b + (1.0 - b1) * g_b;
    v_b = b2 * v_b + (1.0 - b2) * g_b.cwiseProduct(g_b);
    head.weights.array() -= cfg.lr * (m_w.array() / bc1) / ((v_w.array() / bc2).sqrt() + eps);
    head.bias.array() -= cfg.lr * (m_b.array() / bc1) / ((v_b.array() / bc2).sqrt() + eps);
  }
  return head;
}

}  // namespace geocurve
