#include "proxbundle/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace proxbundle {

const char* to_string(PlaneTag tag) {
  switch (tag) {
    case PlaneTag::kExactness:
      return "exactness";
    case PlaneTag::kCutting:
      return "cutting";
    case PlaneTag::kAggregate:
      return "aggregate";
    case PlaneTag::kRecycled:
      return "recycled";
  }
  return "unknown";
}

double offset_tolerance(double value) { return 1e-12 * (1.0 + std::abs(value)); }

WorkingModel::WorkingModel(Vector serious_point, double serious_value, Matrix curvature,
                           std::size_t plane_budget)
    : serious_point_(std::move(serious_point)),
      serious_value_(serious_value),
      curvature_(std::move(curvature)),
      plane_budget_(plane_budget) {
  const Index n = serious_point_.size();
  if (curvature_.rows() != n || curvature_.cols() != n) {
    throw StructuralError(fmt::format("curvature is {}x{}, expected {}x{}", curvature_.rows(),
                                      curvature_.cols(), n, n));
  }
  const double scale = 1.0 + curvature_.cwiseAbs().maxCoeff();
  if ((curvature_ - curvature_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw StructuralError("curvature matrix is not symmetric");
  }
  if (plane_budget_ == 0) {
    throw ConfigError("plane budget must be positive");
  }
}

std::uint64_t WorkingModel::add(Plane plane) {
  if (plane.gradient.size() != dimension()) {
    throw StructuralError(fmt::format("plane gradient has dimension {}, model has {}",
                                      plane.gradient.size(), dimension()));
  }
  const double tol = offset_tolerance(serious_value_);
  if (!(plane.offset <= serious_value_ + tol)) {
    throw StructuralError(fmt::format("plane offset {:.17g} exceeds f(x) = {:.17g}", plane.offset,
                                      serious_value_));
  }
  plane.offset = std::min(plane.offset, serious_value_);
  if (plane.tag == PlaneTag::kExactness) {
    if (std::abs(plane.offset - serious_value_) > tol) {
      throw StructuralError("exactness plane offset differs from f(x)");
    }
    plane.offset = serious_value_;
  }

  // Two planes with the same gradient: the one with the larger offset dominates.
  for (Plane& existing : planes_) {
    if (existing.gradient == plane.gradient) {
      if (plane.offset > existing.offset) {
        existing.offset = plane.offset;
        existing.origin = plane.origin;
      }
      if (plane.tag == PlaneTag::kExactness) existing.tag = PlaneTag::kExactness;
      return existing.id;
    }
  }
  plane.id = next_id_++;
  planes_.push_back(std::move(plane));
  return planes_.back().id;
}

double WorkingModel::plane_value(std::size_t i, const Vector& y) const {
  const Plane& p = planes_[i];
  return p.offset + p.gradient.dot(y - serious_point_);
}

double WorkingModel::eval_first_order(const Vector& y) const {
  if (planes_.empty()) {
    throw StructuralError("working model has no planes");
  }
  if (y.size() != dimension()) {
    throw StructuralError("evaluation point has wrong dimension");
  }
  const Vector d = y - serious_point_;
  double best = -std::numeric_limits<double>::infinity();
  for (const Plane& p : planes_) {
    best = std::max(best, p.offset + p.gradient.dot(d));
  }
  return best;
}

double WorkingModel::eval_second_order(const Vector& y) const {
  const Vector d = y - serious_point_;
  return eval_first_order(y) + 0.5 * d.dot(curvature_ * d);
}

bool WorkingModel::has_exactness_plane() const {
  return std::any_of(planes_.begin(), planes_.end(), [&](const Plane& p) {
    return p.tag == PlaneTag::kExactness && p.offset == serious_value_;
  });
}

std::size_t WorkingModel::index_of(std::uint64_t id) const {
  for (std::size_t i = 0; i < planes_.size(); ++i) {
    if (planes_[i].id == id) return i;
  }
  return planes_.size();
}

void WorkingModel::prune(std::span<const std::uint64_t> protected_ids) {
  auto is_protected = [&](const Plane& p) {
    return std::find(protected_ids.begin(), protected_ids.end(), p.id) != protected_ids.end();
  };
  const auto n_protected =
      static_cast<std::size_t>(std::count_if(planes_.begin(), planes_.end(), is_protected));
  if (n_protected > plane_budget_) {
    throw ConfigError(fmt::format("plane budget {} is smaller than the {} protected planes",
                                  plane_budget_, n_protected));
  }
  if (planes_.size() <= plane_budget_) return;

  std::vector<std::uint64_t> candidates;
  for (const Plane& p : planes_) {
    if (!is_protected(p)) candidates.push_back(p.id);
  }
  std::sort(candidates.begin(), candidates.end());
  const std::size_t excess = planes_.size() - plane_budget_;
  candidates.resize(excess);
  std::erase_if(planes_, [&](const Plane& p) {
    return std::binary_search(candidates.begin(), candidates.end(), p.id);
  });
}

Plane aggregate_plane(const WorkingModel& model, const MultiplierSet& multipliers) {
  const Vector& lambda = multipliers.plane_multipliers;
  if (static_cast<std::size_t>(lambda.size()) != model.size()) {
    throw StructuralError(fmt::format("{} plane multipliers for {} planes", lambda.size(),
                                      model.size()));
  }
  if (model.size() == 0) {
    throw StructuralError("cannot aggregate an empty model");
  }
  const double total = lambda.sum();
  if (!(total > 0.0) || lambda.minCoeff() < -1e-10) {
    throw StructuralError("plane multipliers are not a valid convex combination");
  }
  Plane agg;
  agg.tag = PlaneTag::kAggregate;
  agg.gradient = Vector::Zero(model.dimension());
  agg.origin = model.serious_point();
  double offset = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double w = std::max(0.0, lambda[static_cast<Index>(i)]) / total;
    if (w == 0.0) continue;
    offset += w * model.planes()[i].offset;
    agg.gradient += w * model.planes()[i].gradient;
  }
  agg.offset = offset;
  return agg;
}

}  // namespace proxbundle
