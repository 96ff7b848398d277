#pragma once

#include <optional>
#include <random>

#include "proxbundle/problem.hpp"

namespace testing {

using proxbundle::Index;
using proxbundle::Matrix;
using proxbundle::Vector;

/// 1/2 x^T H x + p^T x + r.
struct Quadratic : proxbundle::Problem {
  Matrix H;
  Vector p;
  double r = 0.0;
  bool with_curvature = true;

  Quadratic(Matrix H_, Vector p_, double r_ = 0.0) : H(std::move(H_)), p(std::move(p_)), r(r_) {}
  Index dimension() const override { return p.size(); }
  double value(const Vector& x) const override { return 0.5 * x.dot(H * x) + p.dot(x) + r; }
  Vector subgradient(const Vector& x) const override { return H * x + p; }
  std::optional<Vector> attaining_subgradient(const Vector& x, const Vector&) const override {
    return subgradient(x);
  }
  std::optional<Matrix> curvature(const Vector&) const override {
    if (!with_curvature) return std::nullopt;
    return H;
  }
};

/// Affine function without an attaining-subgradient method (black box).
struct BlackBoxAffine : proxbundle::Problem {
  Vector g;
  double c = 0.0;
  explicit BlackBoxAffine(Vector g_, double c_ = 0.0) : g(std::move(g_)), c(c_) {}
  Index dimension() const override { return g.size(); }
  double value(const Vector& x) const override { return g.dot(x) + c; }
  Vector subgradient(const Vector&) const override { return g; }
};

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Matrix mat(Index rows, Index cols, std::initializer_list<double> v) {
  Matrix out(rows, cols);
  auto it = v.begin();
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) out(r, c) = *it++;
  return out;
}

inline Vector random_vector(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Matrix random_spd(std::mt19937_64& rng, Index n, double shift) {
  Matrix R(n, n);
  std::normal_distribution<double> g(0.0, 1.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) R(i, j) = g(rng);
  return R * R.transpose() + shift * Matrix::Identity(n, n);
}

}  // namespace testing
