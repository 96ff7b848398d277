#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "proxbundle/problem.hpp"
#include "proxbundle/tangent_qp.hpp"

namespace proxbundle {

/// Quadratic branch 1/2 x^T H x + p^T x + r.
struct QuadraticBranch {
  Matrix hessian;
  Vector linear;
  double constant = 0.0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

enum class Combiner { kMax, kMin };

struct PiecewiseEval {
  double value = 0.0;
  std::vector<std::size_t> active;
};

/// f(x) = max_i f_i(x) (lower-C1) or min_i f_i(x) (upper-C1) over quadratic branches.
class PiecewiseQuadratic : public Problem {
 public:
  static constexpr double kActiveTolerance = 1e-12;

  PiecewiseQuadratic(std::vector<QuadraticBranch> branches, Combiner combiner);

  Index dimension() const override { return dimension_; }
  double value(const Vector& x) const override { return eval(x).value; }
  /// Average of the active branch gradients.
  Vector subgradient(const Vector& x) const override;
  /// Active branch gradient maximizing g^T d.
  std::optional<Vector> attaining_subgradient(const Vector& x, const Vector& d) const override;
  /// Average of the active branch Hessians.
  std::optional<Matrix> curvature(const Vector& x) const override;

  PiecewiseEval eval(const Vector& x) const;
  const std::vector<QuadraticBranch>& branches() const { return branches_; }
  Combiner combiner() const { return combiner_; }

  /// Upper bound of |grad f_i| over the box, from the box corners and the
  /// spectral norm of H_i.
  double lipschitz_bound(const Vector& lower, const Vector& upper) const;

 private:
  std::vector<QuadraticBranch> branches_;
  Combiner combiner_;
  Index dimension_;
};

struct GridOracleResult {
  Vector point;
  double value = 0.0;
  std::size_t evaluated = 0;
};

/// Exhaustive search over a uniform grid of the box with the given spacing
/// (endpoints included). Refuses dimensions above 3.
GridOracleResult grid_oracle(const Problem& problem, const Vector& lower, const Vector& upper,
                             double resolution);

/// Synthetic test instance from the fixtures file.
struct CorpusInstance {
  std::string id;
  std::string smoothness;  // "lower" or "upper"
  std::string description;
  PiecewiseQuadratic problem;
  Vector lower;
  Vector upper;
  Vector start;
  // Grid oracle reference recorded in the fixtures file.
  Vector oracle_point;
  double oracle_value = 0.0;
  double oracle_resolution = 0.0;
  double oracle_lipschitz = 0.0;

  Polyhedron constraints() const { return Polyhedron::box(lower, upper); }
  double oracle_tolerance() const { return oracle_resolution * oracle_lipschitz; }
};

std::vector<CorpusInstance> load_corpus(const std::filesystem::path& path);
const CorpusInstance& find_instance(const std::vector<CorpusInstance>& corpus,
                                    const std::string& id);

}  // namespace proxbundle
