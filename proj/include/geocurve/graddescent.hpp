#pragma once

// Reverse-mode gradients of the curve-fitting objective with respect to the
// raw endpoint features and the pre-sigmoid sampling parameters, an Adam
// optimizer over those three tensors, and a central-difference oracle.
//
// Forward graph:
//   t      = sigmoid(t_raw)
//   tau_s  = normalize(center(duplicate(v_start)))      (same for tau_e)
//   theta  = acos(<tau_s, tau_e>)
//   col_i  = sin((1 - t_i) theta) / sin theta * tau_s + sin(t_i theta) / sin theta * tau_e
//   L      = sqrt(sum_i (1 - <col_i, orig_i>)^2) + beta * mean_j |t_(j) - z_(j)|

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "geocurve/geodesic.hpp"
#include "geocurve/losses.hpp"

namespace geocurve {

struct ParamSet {
  Vector v_start;
  Vector v_end;
  Vector t_raw;
};

struct GradSet {
  Vector d_v_start;
  Vector d_v_end;
  Vector d_t_raw;
};

/// Inner products are clamped to this distance from +-1 when differentiating acos.
inline constexpr double kAcosClampEps = 1e-7;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Everything backward() needs, captured by forward().
struct ForwardCache {
  Matrix originals;
  std::vector<double> z;
  double beta = 0.0;

  std::vector<double> t;
  Vector tau_start;
  Vector tau_end;
  double norm_start = 0.0;  // norm of the centered pair vector before scaling
  double norm_end = 0.0;
  double inner = 0.0;  // <tau_start, tau_end>
  double theta = 0.0;
  Matrix sampled;
  Vector sampled_inner;  // <col_i, orig_i>
  std::vector<std::size_t> t_order;
  std::vector<double> z_sorted;
  LossReport report;
};

namespace detail {

struct Projected {
  PreShapeVector tau;
  double norm;
};

inline Projected project_with_norm(const Vector& v) {
  const PairedVector centered = center(duplicate(RawFeature(v)));
  const double n = norm_ordered(centered.coords());
  return Projected{normalize(centered), n};
}

/// Pull a gradient w.r.t. the pre-shape back to the raw feature.
inline Vector projection_adjoint(const Vector& tau, double norm, const Vector& g_tau) {
  Vector g = (g_tau - tau * dot_ordered(tau, g_tau)) / norm;
  const auto [mx, my] = axis_means(g);
  const Eigen::Index d = g.size() / 2;
  Vector out(d);
  for (Eigen::Index i = 0; i < d; ++i) out[i] = (g[2 * i] - mx) + (g[2 * i + 1] - my);
  return out;
}

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

/// Evaluates the loss and records intermediates. `originals` is 2d x m, z has m entries.
inline ForwardCache forward(const ParamSet& params, const Matrix& originals, std::span<const double> z, double beta,
                            double theta_min = kThetaMin) {
  const auto m = static_cast<std::size_t>(params.t_raw.size());
  if (originals.cols() != static_cast<Eigen::Index>(m) || z.size() != m) {
    throw Error(ErrorKind::LengthMismatch, "forward: t_raw, originals and z must have the same count");
  }
  if (params.v_start.size() != params.v_end.size() || originals.rows() != 2 * params.v_start.size()) {
    throw Error(ErrorKind::DimensionMismatch, "forward: endpoint and original dimensions disagree");
  }

  ForwardCache c;
  c.originals = originals;
  c.z.assign(z.begin(), z.end());
  c.beta = beta;

  c.t.resize(m);
  for (std::size_t i = 0; i < m; ++i) c.t[i] = sigmoid(params.t_raw[static_cast<Eigen::Index>(i)]);

  auto ps = detail::project_with_norm(params.v_start);
  auto pe = detail::project_with_norm(params.v_end);
  c.tau_start = ps.tau.coords();
  c.tau_end = pe.tau.coords();
  c.norm_start = ps.norm;
  c.norm_end = pe.norm;
  c.inner = detail::dot_ordered(c.tau_start, c.tau_end);

  const GeodesicCurve curve = GeodesicCurve::make(std::move(ps.tau), std::move(pe.tau), theta_min);
  c.theta = curve.theta();
  c.sampled = interp_batch(curve, c.t);
  c.sampled_inner = column_inner_products(c.sampled, originals);

  const double sim = sim_loss(c.sampled, originals);
  const double div = divergence_loss(c.t, z);
  c.report = total_loss(sim, div, beta);

  c.t_order = sort_permutation(c.t);
  const auto z_order = sort_permutation(z);
  c.z_sorted.resize(m);
  for (std::size_t j = 0; j < m; ++j) c.z_sorted[j] = z[z_order[j]];
  return c;
}

inline GradSet backward(const ForwardCache& c) {
  const auto m = static_cast<Eigen::Index>(c.t.size());
  const double theta = c.theta;
  const double sin_t = std::sin(theta);
  const double cos_t = std::cos(theta);
  const double sim = c.report.sim;

  Vector g_tau_s = Vector::Zero(c.tau_start.size());
  Vector g_tau_e = Vector::Zero(c.tau_end.size());
  Vector g_t = Vector::Zero(m);
  double g_theta = 0.0;

  for (Eigen::Index i = 0; i < m; ++i) {
    // d sim / d <col_i, orig_i>; the minimum sim = 0 gets the zero subgradient.
    const double g_q = sim > 0.0 ? -(1.0 - c.sampled_inner[i]) / sim : 0.0;
    if (g_q == 0.0) continue;
    const double ti = c.t[static_cast<std::size_t>(i)];
    const double u = (1.0 - ti) * theta;
    const double w = ti * theta;
    const double wa = std::sin(u) / sin_t;
    const double wb = std::sin(w) / sin_t;
    const auto orig = c.originals.col(i);
    const double pa = c.tau_start.dot(orig);
    const double pb = c.tau_end.dot(orig);

    const double dwa_dt = -theta * std::cos(u) / sin_t;
    const double dwb_dt = theta * std::cos(w) / sin_t;
    g_t[i] += g_q * (dwa_dt * pa + dwb_dt * pb);

    const double dwa_dth = ((1.0 - ti) * std::cos(u) * sin_t - std::sin(u) * cos_t) / (sin_t * sin_t);
    const double dwb_dth = (ti * std::cos(w) * sin_t - std::sin(w) * cos_t) / (sin_t * sin_t);
    g_theta += g_q * (dwa_dth * pa + dwb_dth * pb);

    g_tau_s += (g_q * wa) * orig;
    g_tau_e += (g_q * wb) * orig;
  }

  // theta = acos(<tau_s, tau_e>); the clamp region has zero derivative.
  const double x = c.inner;
  if (x > -1.0 + kAcosClampEps && x < 1.0 - kAcosClampEps) {
    const double g_inner = g_theta * (-1.0 / std::sqrt(1.0 - x * x));
    g_tau_s += g_inner * c.tau_end;
    g_tau_e += g_inner * c.tau_start;
  }

  // Divergence term: route each sorted-position subgradient to its source index.
  const double scale = c.beta / static_cast<double>(m);
  for (std::size_t j = 0; j < c.t_order.size(); ++j) {
    const std::size_t i = c.t_order[j];
    g_t[static_cast<Eigen::Index>(i)] += scale * detail::sign(c.t[i] - c.z_sorted[j]);
  }

  GradSet g;
  g.d_t_raw.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double ti = c.t[static_cast<std::size_t>(i)];
    g.d_t_raw[i] = g_t[i] * ti * (1.0 - ti);
  }
  g.d_v_start = detail::projection_adjoint(c.tau_start, c.norm_start, g_tau_s);
  g.d_v_end = detail::projection_adjoint(c.tau_end, c.norm_end, g_tau_e);
  return g;
}

/// Central differences, one scalar parameter at a time, z held fixed.
inline GradSet finite_diff(const ParamSet& params, const Matrix& originals, std::span<const double> z, double beta,
                           double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite_diff step must be positive");
  auto loss_at = [&](const ParamSet& p) { return forward(p, originals, z, beta).report.total; };
  auto differentiate = [&](Vector ParamSet::*member) {
    ParamSet p = params;
    Vector& target = p.*member;
    Vector out(target.size());
    for (Eigen::Index i = 0; i < target.size(); ++i) {
      const double x0 = target[i];
      target[i] = x0 + h;
      const double up = loss_at(p);
      target[i] = x0 - h;
      const double down = loss_at(p);
      target[i] = x0;
      out[i] = (up - down) / (2.0 * h);
    }
    return out;
  };
  return GradSet{differentiate(&ParamSet::v_start), differentiate(&ParamSet::v_end),
                 differentiate(&ParamSet::t_raw)};
}

struct AdamMoments {
  Vector first;
  Vector second;
};

struct AdamState {
  AdamMoments v_start;
  AdamMoments v_end;
  AdamMoments t_raw;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros_like(const ParamSet& p) {
    AdamState s;
    s.v_start = {Vector::Zero(p.v_start.size()), Vector::Zero(p.v_start.size())};
    s.v_end = {Vector::Zero(p.v_end.size()), Vector::Zero(p.v_end.size())};
    s.t_raw = {Vector::Zero(p.t_raw.size()), Vector::Zero(p.t_raw.size())};
    return s;
  }
};

namespace detail {

inline void adam_update(Vector& param, const Vector& grad, AdamMoments& mom, const AdamState& s, double lr) {
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    mom.first[i] = s.beta1 * mom.first[i] + (1.0 - s.beta1) * grad[i];
    mom.second[i] = s.beta2 * mom.second[i] + (1.0 - s.beta2) * grad[i] * grad[i];
    const double m_hat = mom.first[i] / bc1;
    const double v_hat = mom.second[i] / bc2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

}  // namespace detail

/// One bias-corrected Adam step; endpoints use lr_endpoints, sampling parameters lr_t.
inline void adam_step(ParamSet& params, const GradSet& grads, AdamState& state, double lr_endpoints,
                      double lr_t) {
  if (grads.d_v_start.size() != params.v_start.size() || grads.d_v_end.size() != params.v_end.size() ||
      grads.d_t_raw.size() != params.t_raw.size()) {
    throw Error(ErrorKind::DimensionMismatch, "adam_step: gradient shapes do not match parameters");
  }
  ++state.step;
  detail::adam_update(params.v_start, grads.d_v_start, state.v_start, state, lr_endpoints);
  detail::adam_update(params.v_end, grads.d_v_end, state.v_end, state, lr_endpoints);
  detail::adam_update(params.t_raw, grads.d_t_raw, state.t_raw, state, lr_t);
}

}  // namespace geocurve
