#pragma once

#include <vector>

#include "proxbundle/model.hpp"
#include "proxbundle/problem.hpp"

namespace proxbundle {

enum class OracleVariant { kStandard, kDownshift, kModified };

const char* to_string(OracleVariant variant);
OracleVariant oracle_variant_from_string(const std::string& name);

struct OracleConfig {
  OracleVariant variant = OracleVariant::kModified;
  // Downshift coefficient c > 0. Non-positive means "choose automatically"
  // via default_downshift_coefficient at the start of a solve.
  double downshift_coefficient = 0.0;
};

/// c = 1e-2 (1 + |f(x1)|) / (1 + |x1|^2).
double default_downshift_coefficient(double f_start, const Vector& x_start);

/// Tangent of f at y, lowered until its value at x is at most f(x) - c|y - x|^2.
/// Returned plane is anchored at x.
Plane downshift_plane(const PointData& x, const PointData& y, double c);

/// Plane f(x) + g^T (. - x) with g attaining f0(x, y - x).
Plane standard_plane(const PointData& x, const Vector& attaining_subgradient);

struct ModifiedCut {
  Plane plane;            // the selected plane
  Plane downshift;        // both candidates, for callers that keep both
  Plane standard;
  bool used_downshift = true;
};

/// Of the downshifted tangent and the standard plane, the one with the larger
/// value at y. Ties go to the downshifted tangent.
ModifiedCut modified_plane(const PointData& x, const PointData& y,
                           const Vector& attaining_subgradient_at_x, double c);

/// Treats `plane` (anchored at old_point) as a tangent at old_point and
/// downshifts it by s = [m(x+) - f(x+) + c |x+ - old|^2]_+; the result is
/// anchored at x+ and tagged `recycled`.
Plane shift_plane(const Plane& plane, const Vector& old_point, const PointData& new_point,
                  double c);

/// Moves planes anchored at `old_point` to the new serious iterate.
///
/// Each plane is treated as a tangent at the old point and downshifted with
/// respect to `new_point`. It is kept only when its value at the old point is
/// at least that of the exactness plane f(x+) + g0^T(. - x+), where g0 attains
/// f0(x+, old - x+); otherwise that exactness plane is added (once) instead.
/// Planes are returned anchored at the new point with tag `recycled`, except
/// the substituted exactness plane which is tagged `exactness`.
std::vector<Plane> recycle(const std::vector<Plane>& planes, const Vector& old_point,
                           const PointData& new_point, const Vector& attaining_subgradient_at_new,
                           double c);

}  // namespace proxbundle
