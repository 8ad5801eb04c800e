#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "mstyle/core/error.hpp"
#include "mstyle/embed/vector.hpp"
#include "mstyle/trainer/projection.hpp"

namespace mstyle::trainer {

/// max(0, d(a,p) - d(a,n) + margin) with cosine distance d = 1 - cos.
inline double triplet_loss(std::span<const double> a, std::span<const double> p,
                           std::span<const double> n, double margin) {
  const double dap = 1.0 - cosine_similarity(a, p);
  const double dan = 1.0 - cosine_similarity(a, n);
  return std::max(0.0, dap - dan + margin);
}

inline double triplet_loss(const EmbeddingVector& a, const EmbeddingVector& p,
                           const EmbeddingVector& n, double margin) {
  return triplet_loss(a.values(), p.values(), n.values(), margin);
}

struct LossGradient {
  double loss = 0.0;
  bool active = false;
  std::vector<double> gradient;  // same layout as ProjectionModel::weights
};

/// Loss of one triplet through the projection and its exact gradient with
/// respect to the weights.
///
/// With u = Wa, v = Wp, w = Wn the loss is cos(u,w) - cos(u,v) + margin when
/// positive. Using
///   d cos(x,y)/dx = y/(|x||y|) - cos(x,y) x/|x|^2
/// the weight gradient is g_u a^T + g_v p^T + g_w n^T with
///   g_u = dcos(u,w)/du - dcos(u,v)/du,  g_v = -dcos(u,v)/dv,
///   g_w = dcos(u,w)/dw.
/// The hinge counts as inactive at exactly zero, giving the zero matrix.
inline LossGradient loss_and_gradient(const ProjectionModel& model, std::span<const double> base_a,
                                      std::span<const double> base_p,
                                      std::span<const double> base_n, double margin) {
  const auto u = model.project(base_a);
  const auto v = model.project(base_p);
  const auto w = model.project(base_n);
  const double nu = vec::norm(u), nv = vec::norm(v), nw = vec::norm(w);
  if (nu < 1e-12 || nv < 1e-12 || nw < 1e-12)
    fail(Errc::domain, "degenerate projected vector (norm < 1e-12)");

  const double cuv = vec::dot(u, v) / (nu * nv);
  const double cuw = vec::dot(u, w) / (nu * nw);
  const double raw = cuw - cuv + margin;

  LossGradient out;
  out.gradient.assign(model.weights.size(), 0.0);
  if (!(raw > 0.0)) return out;
  out.loss = raw;
  out.active = true;

  const std::size_t m = model.out_dim;
  std::vector<double> gu(m), gv(m), gw(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double dcuw_du = w[r] / (nu * nw) - cuw * u[r] / (nu * nu);
    const double dcuv_du = v[r] / (nu * nv) - cuv * u[r] / (nu * nu);
    gu[r] = dcuw_du - dcuv_du;
    gv[r] = -(u[r] / (nu * nv) - cuv * v[r] / (nv * nv));
    gw[r] = u[r] / (nu * nw) - cuw * w[r] / (nw * nw);
  }
  const std::size_t k = model.in_dim;
  for (std::size_t r = 0; r < m; ++r) {
    double* row = out.gradient.data() + r * k;
    for (std::size_t c = 0; c < k; ++c)
      row[c] = gu[r] * base_a[c] + gv[r] * base_p[c] + gw[r] * base_n[c];
  }
  return out;
}

inline std::vector<double> loss_gradient(const ProjectionModel& model, std::span<const double> base_a,
                                         std::span<const double> base_p,
                                         std::span<const double> base_n, double margin) {
  return loss_and_gradient(model, base_a, base_p, base_n, margin).gradient;
}

}  // namespace mstyle::trainer
