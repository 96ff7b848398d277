#pragma once

#include <map>
#include <optional>
#include <vector>

#include "proxbundle/model.hpp"

namespace proxbundle {

/// Linear inequality constraints A y <= b.
struct Polyhedron {
  Matrix A;
  Vector b;

  static Polyhedron unconstrained(Index n);
  static Polyhedron box(const Vector& lower, const Vector& upper);

  Index rows() const { return A.rows(); }
  Index dimension() const { return A.cols(); }
  /// max(0, max_i (A y - b)_i)
  double violation(const Vector& y) const;
  bool contains(const Vector& y, double tol = 1e-9) const { return violation(y) <= tol; }
};

struct TangentSolution {
  Vector trial_point;
  double model_value = 0.0;  // second-order model Phi_k(y, x)
  double first_order_value = 0.0;  // phi_k(y, x)
  MultiplierSet multipliers;
  double kkt_residual = 0.0;
  int iterations = 0;
};

/// Components of the tangent-program KKT conditions, each scaled to be
/// dimensionless. kkt_residual is their maximum.
struct KktReport {
  double stationarity = 0.0;
  double simplex = 0.0;
  double primal = 0.0;
  double complementarity = 0.0;
  double dual_sign = 0.0;
  double max() const;
};

/// true iff the smallest eigenvalue of Q + tau I exceeds 1e-12.
bool check_positive_definite(const Matrix& Q, double tau);

/// Solves
///   minimize  phi(y) + 1/2 (y - x)^T (Q + tau I) (y - x)   subject to  A y <= b
/// in epigraph form (y, t) with one constraint per plane. Primal active-set
/// method; equality subproblems are solved through the Schur complement of
/// the cached Cholesky factor of Q + tau I. The last working set of constraint
/// rows is reused as a warm start while the serious point does not change.
class TangentSolver {
 public:
  explicit TangentSolver(Polyhedron constraints);

  const Polyhedron& constraints() const { return constraints_; }

  TangentSolution solve(const WorkingModel& model, double tau);

  /// Recomputes the KKT report of a solution from scratch.
  KktReport kkt_report(const WorkingModel& model, double tau, const TangentSolution& sol) const;

  /// Number of Cholesky factorizations performed so far.
  int factorizations() const { return factorizations_; }

 private:
  struct WorkingEntry {
    bool is_plane;
    Index index;  // plane index in the model or constraint row
  };

  void refresh_factorization(const WorkingModel& model, double tau);
  const Vector& plane_column(const WorkingModel& model, std::size_t i);
  const Vector& row_column(Index j);

  Polyhedron constraints_;

  // Factorization cache.
  std::optional<Eigen::LLT<Matrix>> llt_;
  Matrix cached_curvature_;
  Vector cached_point_;
  double cached_tau_ = -1.0;
  int factorizations_ = 0;
  std::map<std::uint64_t, Vector> plane_columns_;  // L^{-1} g keyed by plane id
  std::vector<std::optional<Vector>> row_columns_;  // L^{-1} A_j^T

  // Warm start.
  std::optional<Vector> last_step_;
  std::vector<Index> last_rows_;
};

}  // namespace proxbundle
