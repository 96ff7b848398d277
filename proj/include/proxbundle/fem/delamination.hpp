#pragma once

#include <vector>

#include "proxbundle/fem/adhesive_law.hpp"
#include "proxbundle/fem/elasticity.hpp"
#include "proxbundle/fem/mesh.hpp"
#include "proxbundle/problem.hpp"
#include "proxbundle/tangent_qp.hpp"

namespace proxbundle::fem {

struct ContactNode {
  Index node = 0;     // mesh node
  Index dof = 0;      // reduced index of its vertical dof
  double weight = 0;  // trapezoidal weight c_nu (mm)
};

/// Discrete delamination problem: reduced stiffness, load and contact data.
///
/// Energy  Pi(v) = 1/2 v^T K v + sum_nu c_nu j(v2(nu)) - g^T v  over the
/// reduced dofs, subject to v2(nu) >= 0 at the contact nodes.
class DelaminationModel {
 public:
  DelaminationModel(Mesh mesh, ElasticityParams params, AdhesiveLaw law, double F2);

  const Mesh& mesh() const { return mesh_; }
  const ElasticityParams& params() const { return params_; }
  const AdhesiveLaw& law() const { return law_; }
  double F2() const { return F2_; }
  const DofMap& dofs() const { return dofs_; }
  Index dimension() const { return dofs_.reduced_size(); }

  const Matrix& stiffness() const { return stiffness_; }
  const Vector& load() const { return load_; }
  const std::vector<ContactNode>& contact_nodes() const { return contact_; }
  /// Contact weight sitting on clamped closure nodes, where the opening is zero.
  double closure_weight() const { return closure_weight_; }
  /// Sum of all trapezoidal weights, equal to the contact boundary length.
  double contact_length() const;

  /// One row -v2(nu) <= 0 per contact node.
  Polyhedron contact_constraints() const;

 private:
  Mesh mesh_;
  ElasticityParams params_;
  AdhesiveLaw law_;
  double F2_;
  DofMap dofs_;
  Matrix stiffness_;
  Vector load_;
  std::vector<ContactNode> contact_;
  double closure_weight_ = 0.0;
};

/// Pi as a black-box problem. At ties between law pieces the subgradient
/// averages the active slopes; the attaining subgradient picks per node the
/// slope maximizing j_i'(v2) d2; the curvature is K + sum c_nu k_i e e^T for an
/// active piece i (the first by index).
class DelaminationEnergy : public Problem {
 public:
  explicit DelaminationEnergy(const DelaminationModel& model) : model_(model) {}

  Index dimension() const override { return model_.dimension(); }
  double value(const Vector& v) const override;
  Vector subgradient(const Vector& v) const override;
  std::optional<Vector> attaining_subgradient(const Vector& v, const Vector& d) const override;
  std::optional<Matrix> curvature(const Vector& v) const override;

  double elastic_energy(const Vector& v) const;
  double adhesive_energy(const Vector& v) const;
  double load_work(const Vector& v) const;

 private:
  const DelaminationModel& model_;
};

struct ReactionSample {
  Index node = 0;
  double x = 0.0;
  double opening = 0.0;             // v2 at the node
  bool constraint_active = false;
  double residual_traction = 0.0;   // -(K v - g)_nu / (c_nu t)
  double law_traction = 0.0;        // j_i'(v2) / t for the active piece
  std::vector<std::size_t> pieces;  // active law pieces
};

/// Reactive normal traction along the contact boundary (N/mm^2) from the
/// equilibrium residual and from the adhesive law. The constraint counts as
/// active when v2 <= active_tol.
std::vector<ReactionSample> recover_reaction(const DelaminationModel& model, const Vector& v,
                                             double active_tol = 1e-10);

/// dist(0, dPi(v) + N(v)) with the Clarke subdifferential per contact node
/// (slopes of the pieces active within `delta`, see AdhesiveLaw::active_near)
/// and the normal cone of the constraints active within `delta`.
double stationarity_residual(const DelaminationModel& model, const Vector& v, double delta);

/// Largest violation max(0, -v2) over the contact nodes.
double contact_violation(const DelaminationModel& model, const Vector& v);

}  // namespace proxbundle::fem
