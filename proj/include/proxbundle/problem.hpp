#pragma once

#include <optional>

#include "proxbundle/types.hpp"

namespace proxbundle {

/// Black-box locally Lipschitz objective.
///
/// `subgradient` returns one element of the Clarke subdifferential.
/// `attaining_subgradient` returns g in the subdifferential at x with
/// g^T d equal to the Clarke directional derivative f0(x, d); problems that
/// cannot compute it return std::nullopt. `curvature` is an optional symmetric
/// second-order term used by the working model.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Index dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector subgradient(const Vector& x) const = 0;
  virtual std::optional<Vector> attaining_subgradient(const Vector& x, const Vector& d) const {
    (void)x;
    (void)d;
    return std::nullopt;
  }
  virtual std::optional<Matrix> curvature(const Vector& x) const {
    (void)x;
    return std::nullopt;
  }
};

/// Function value and one Clarke subgradient at a point.
struct PointData {
  Vector point;
  double value = 0.0;
  Vector subgradient;
};

PointData evaluate(const Problem& problem, const Vector& x);

/// Subgradient attaining f0(x, d), falling back to the plain Clarke
/// subgradient stored in `x` when the problem cannot provide one.
/// `exact` (optional) reports which route was taken.
Vector attaining_or_fallback(const Problem& problem, const PointData& x, const Vector& d,
                             bool* exact = nullptr);

}  // namespace proxbundle
