#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mstyle/core/error.hpp"

namespace mstyle {

/// Fixed-dimension real vector with finite entries.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    require(!values_.empty(), Errc::shape, "embedding vector must have dim > 0");
    for (double v : values_)
      require(std::isfinite(v), Errc::numeric, "embedding vector has a non-finite entry");
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& raw() const noexcept { return values_; }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

namespace vec {

inline double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double norm(std::span<const double> u) { return std::sqrt(dot(u, u)); }

inline void check_same_dim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    fail(Errc::shape, "dimension mismatch: " + std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()));
}

/// Unit-length copy; throws a domain error for the zero vector.
inline std::vector<double> normalized(std::span<const double> u) {
  const double n = norm(u);
  if (!(n > 1e-300))
    fail(Errc::domain, "cannot normalize a zero-norm vector");
  std::vector<double> out(u.begin(), u.end());
  for (double& x : out) x /= n;
  return out;
}

}  // namespace vec

/// u·v / (‖u‖‖v‖), clamped to [-1, 1]. Exactly symmetric in its arguments.
inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  vec::check_same_dim(u, v);
  const double uu = vec::dot(u, u);
  const double vv = vec::dot(v, v);
  if (!(uu > 0.0) || !(vv > 0.0))
    fail(Errc::domain, "cosine similarity of a zero-norm vector");
  const double c = vec::dot(u, v) / std::sqrt(uu * vv);
  return std::clamp(c, -1.0, 1.0);
}

inline double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine_similarity(u.values(), v.values());
}

inline double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
  return 1.0 - cosine_similarity(u, v);
}

}  // namespace mstyle
