#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "proxbundle/types.hpp"

namespace proxbundle {

enum class PlaneTag { kExactness, kCutting, kAggregate, kRecycled };

const char* to_string(PlaneTag tag);

/// Affine function y -> offset + gradient^T (y - x) anchored at a serious iterate x.
///
/// The offset is the value at the anchor, not an absolute intercept, so moving
/// the anchor is a pure offset shift.
struct Plane {
  double offset = 0.0;
  Vector gradient;
  PlaneTag tag = PlaneTag::kCutting;
  Vector origin;  // point that generated the plane, diagnostics only
  std::uint64_t id = 0;  // assigned by WorkingModel::add, increases with age
};

/// Dual weights of the tangent program: one per plane, one per constraint row.
struct MultiplierSet {
  Vector plane_multipliers;
  Vector constraint_multipliers;
};

/// First-order polyhedral model phi(., x) = max over planes, plus the
/// second-order term 1/2 (y - x)^T Q (y - x).
class WorkingModel {
 public:
  static constexpr std::size_t kDefaultPlaneBudget = 100;

  WorkingModel(Vector serious_point, double serious_value, Matrix curvature,
               std::size_t plane_budget = kDefaultPlaneBudget);

  Index dimension() const { return serious_point_.size(); }
  const Vector& serious_point() const { return serious_point_; }
  double serious_value() const { return serious_value_; }
  const Matrix& curvature() const { return curvature_; }
  std::size_t plane_budget() const { return plane_budget_; }
  const std::vector<Plane>& planes() const { return planes_; }
  std::size_t size() const { return planes_.size(); }

  /// Inserts a plane and returns its id. Offsets above f(x) by more than
  /// rounding are rejected; exactness planes must have offset == f(x).
  /// A plane with the same gradient as an existing one is merged into it:
  /// the larger offset is kept, the tag becomes exactness if either plane is
  /// one, and the existing id is returned.
  std::uint64_t add(Plane plane);

  double plane_value(std::size_t i, const Vector& y) const;
  double eval_first_order(const Vector& y) const;
  double eval_second_order(const Vector& y) const;

  bool has_exactness_plane() const;
  std::size_t index_of(std::uint64_t id) const;  // size() if absent

  /// Drops the oldest unprotected planes until the budget is met.
  void prune(std::span<const std::uint64_t> protected_ids);

  std::uint64_t next_id() const { return next_id_; }
  void set_next_id(std::uint64_t id) { next_id_ = id; }

 private:
  Vector serious_point_;
  double serious_value_;
  Matrix curvature_;
  std::size_t plane_budget_;
  std::vector<Plane> planes_;
  std::uint64_t next_id_ = 1;
};

/// Convex combination of the model planes with the given plane multipliers.
/// The multipliers are renormalized to sum to one before combining.
Plane aggregate_plane(const WorkingModel& model, const MultiplierSet& multipliers);

/// Tolerance used when checking offset <= f(x).
double offset_tolerance(double value);

}  // namespace proxbundle
