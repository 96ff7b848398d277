#include "proxbundle/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace proxbundle {

PointData evaluate(const Problem& problem, const Vector& x) {
  PointData data;
  data.point = x;
  data.value = problem.value(x);
  data.subgradient = problem.subgradient(x);
  return data;
}

Vector attaining_or_fallback(const Problem& problem, const PointData& x, const Vector& d,
                             bool* exact) {
  std::optional<Vector> g = problem.attaining_subgradient(x.point, d);
  if (exact != nullptr) *exact = g.has_value();
  if (g) return *std::move(g);
  return x.subgradient;
}

const char* to_string(OracleVariant variant) {
  switch (variant) {
    case OracleVariant::kStandard:
      return "standard";
    case OracleVariant::kDownshift:
      return "downshift";
    case OracleVariant::kModified:
      return "modified";
  }
  return "unknown";
}

OracleVariant oracle_variant_from_string(const std::string& name) {
  if (name == "standard") return OracleVariant::kStandard;
  if (name == "downshift") return OracleVariant::kDownshift;
  if (name == "modified") return OracleVariant::kModified;
  throw ConfigError(fmt::format("unknown oracle variant '{}'", name));
}

double default_downshift_coefficient(double f_start, const Vector& x_start) {
  return 1e-2 * (1.0 + std::abs(f_start)) / (1.0 + x_start.squaredNorm());
}

namespace {

void check_dimensions(const PointData& x, const PointData& y) {
  if (x.point.size() != y.point.size() || y.subgradient.size() != y.point.size()) {
    throw StructuralError("oracle inputs have mismatched dimensions");
  }
}

}  // namespace

Plane downshift_plane(const PointData& x, const PointData& y, double c) {
  check_dimensions(x, y);
  const Vector step = y.point - x.point;
  // Tangent at y evaluated at x.
  const double tangent_at_x = y.value - y.subgradient.dot(step);
  Plane plane;
  plane.offset = std::min(tangent_at_x, x.value - c * step.squaredNorm());
  plane.gradient = y.subgradient;
  plane.tag = PlaneTag::kCutting;
  plane.origin = y.point;
  return plane;
}

Plane standard_plane(const PointData& x, const Vector& attaining_subgradient) {
  if (attaining_subgradient.size() != x.point.size()) {
    throw StructuralError("attaining subgradient has wrong dimension");
  }
  Plane plane;
  plane.offset = x.value;
  plane.gradient = attaining_subgradient;
  plane.tag = PlaneTag::kCutting;
  plane.origin = x.point;
  return plane;
}

ModifiedCut modified_plane(const PointData& x, const PointData& y,
                           const Vector& attaining_subgradient_at_x, double c) {
  ModifiedCut cut;
  cut.downshift = downshift_plane(x, y, c);
  cut.standard = standard_plane(x, attaining_subgradient_at_x);
  const Vector step = y.point - x.point;
  const double down_at_y = cut.downshift.offset + cut.downshift.gradient.dot(step);
  const double std_at_y = cut.standard.offset + cut.standard.gradient.dot(step);
  cut.used_downshift = down_at_y >= std_at_y;
  cut.plane = cut.used_downshift ? cut.downshift : cut.standard;
  return cut;
}

Plane shift_plane(const Plane& plane, const Vector& old_point, const PointData& new_point,
                  double c) {
  const Vector shift = new_point.point - old_point;
  const double at_new = plane.offset + plane.gradient.dot(shift);
  const double s = std::max(0.0, at_new - new_point.value + c * shift.squaredNorm());
  Plane moved = plane;
  moved.offset = at_new - s;
  moved.tag = PlaneTag::kRecycled;
  return moved;
}

std::vector<Plane> recycle(const std::vector<Plane>& planes, const Vector& old_point,
                           const PointData& new_point, const Vector& attaining_subgradient_at_new,
                           double c) {
  const Vector shift = new_point.point - old_point;
  // Exactness plane at the new point, evaluated at the old point.
  const double exact_at_old = new_point.value - attaining_subgradient_at_new.dot(shift);

  std::vector<Plane> out;
  out.reserve(planes.size() + 1);
  bool exactness_added = false;
  for (const Plane& p : planes) {
    Plane moved = shift_plane(p, old_point, new_point, c);
    // Value of the shifted plane back at the old point.
    const double at_old = moved.offset - moved.gradient.dot(shift);
    if (at_old >= exact_at_old) {
      out.push_back(std::move(moved));
    } else if (!exactness_added) {
      Plane exact;
      exact.offset = new_point.value;
      exact.gradient = attaining_subgradient_at_new;
      exact.tag = PlaneTag::kExactness;
      exact.origin = new_point.point;
      out.push_back(std::move(exact));
      exactness_added = true;
    }
  }
  return out;
}

}  // namespace proxbundle
