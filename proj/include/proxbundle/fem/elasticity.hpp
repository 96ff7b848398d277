#pragma once

#include <vector>

#include "proxbundle/fem/mesh.hpp"

namespace proxbundle::fem {

/// Plane-stress isotropic material. Young's modulus in N/mm^2, thickness in mm.
struct ElasticityParams {
  double young_modulus = 210000.0;
  double poisson_ratio = 0.3;
  double thickness = 5.0;

  void validate() const;
};

using ElementMatrix = Eigen::Matrix<double, 6, 6>;
using ElementVector = Eigen::Matrix<double, 6, 1>;

/// Constitutive matrix mapping (e_xx, e_yy, 2 e_xy) to (s_xx, s_yy, s_xy).
Eigen::Matrix3d plane_stress_matrix(const ElasticityParams& params);

/// Strain-displacement matrix of a linear triangle; dofs ordered (u1, u2) per vertex.
/// Throws StructuralError for a degenerate or clockwise triangle.
Eigen::Matrix<double, 3, 6> strain_matrix(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                          const Eigen::Vector2d& p2, double* area = nullptr);

/// thickness * area * B^T D B.
ElementMatrix element_stiffness(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                const Eigen::Vector2d& p2, const ElasticityParams& params);

/// Constant stress of a triangle for vertex displacements u.
Eigen::Vector3d element_stress(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                               const Eigen::Vector2d& p2, const ElementVector& u,
                               const ElasticityParams& params);

/// Global stiffness over all 2 * nodes dofs (dof 2i = u1, 2i + 1 = u2 of node i),
/// summed element by element in mesh order.
Matrix assemble_stiffness(const Mesh& mesh, const ElasticityParams& params);

/// Nodal loads of a vertical traction F2 (N/mm^2) on the loaded edges:
/// each edge of length l gives l * thickness * F2 / 2 to both endpoints.
Vector assemble_load(const Mesh& mesh, double F2, double thickness);

/// Numbering of the dofs left after removing the clamped nodes.
struct DofMap {
  std::vector<Index> reduced_of_full;  // -1 for clamped dofs
  std::vector<Index> full_of_reduced;

  Index full_size() const { return static_cast<Index>(reduced_of_full.size()); }
  Index reduced_size() const { return static_cast<Index>(full_of_reduced.size()); }
  Vector expand(const Vector& reduced) const;
  Vector restrict(const Vector& full) const;
  Matrix restrict(const Matrix& full) const;
};

DofMap make_dof_map(const Mesh& mesh);

}  // namespace proxbundle::fem
