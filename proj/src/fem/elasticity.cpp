#include "proxbundle/fem/elasticity.hpp"

#include <cmath>

#include <fmt/format.h>

namespace proxbundle::fem {

void ElasticityParams::validate() const {
  if (!(young_modulus > 0.0)) throw ConfigError("Young's modulus must be positive");
  if (!(poisson_ratio > 0.0 && poisson_ratio < 0.5)) {
    throw ConfigError("Poisson ratio must lie in (0, 0.5)");
  }
  if (!(thickness > 0.0)) throw ConfigError("thickness must be positive");
}

Eigen::Matrix3d plane_stress_matrix(const ElasticityParams& params) {
  const double E = params.young_modulus, nu = params.poisson_ratio;
  const double s = E / (1.0 - nu * nu);
  Eigen::Matrix3d D;
  D << s, s * nu, 0.0,
       s * nu, s, 0.0,
       0.0, 0.0, s * (1.0 - nu) / 2.0;
  return D;
}

Eigen::Matrix<double, 3, 6> strain_matrix(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                          const Eigen::Vector2d& p2, double* area) {
  const double two_area =
      (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  const double scale = (p1 - p0).squaredNorm() + (p2 - p0).squaredNorm();
  if (!(two_area > 1e-12 * scale)) {
    throw StructuralError("degenerate or clockwise triangle");
  }
  const double b[3] = {p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y()};
  const double c[3] = {p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x()};
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    B(0, 2 * i) = b[i];
    B(1, 2 * i + 1) = c[i];
    B(2, 2 * i) = c[i];
    B(2, 2 * i + 1) = b[i];
  }
  if (area) *area = 0.5 * two_area;
  return B / two_area;
}

ElementMatrix element_stiffness(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                const Eigen::Vector2d& p2, const ElasticityParams& params) {
  double area = 0.0;
  const auto B = strain_matrix(p0, p1, p2, &area);
  ElementMatrix K = params.thickness * area * B.transpose() * plane_stress_matrix(params) * B;
  return 0.5 * (K + K.transpose());
}

Eigen::Vector3d element_stress(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                               const Eigen::Vector2d& p2, const ElementVector& u,
                               const ElasticityParams& params) {
  return plane_stress_matrix(params) * (strain_matrix(p0, p1, p2) * u);
}

Matrix assemble_stiffness(const Mesh& mesh, const ElasticityParams& params) {
  params.validate();
  const Index n = 2 * mesh.node_count();
  Matrix K = Matrix::Zero(n, n);
  for (const auto& tri : mesh.triangles) {
    const ElementMatrix Ke =
        element_stiffness(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], params);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        K.block<2, 2>(2 * tri[a], 2 * tri[b]) += Ke.block<2, 2>(2 * a, 2 * b);
      }
    }
  }
  return K;
}

Vector assemble_load(const Mesh& mesh, double F2, double thickness) {
  Vector g = Vector::Zero(2 * mesh.node_count());
  for (const BoundaryEdge& e : mesh.edges) {
    if (e.part != BoundaryPart::kLoaded) continue;
    const double share = 0.5 * mesh.edge_length(e) * thickness * F2;
    g[2 * e.a + 1] += share;
    g[2 * e.b + 1] += share;
  }
  return g;
}

Vector DofMap::expand(const Vector& reduced) const {
  if (reduced.size() != reduced_size()) throw StructuralError("reduced vector has wrong size");
  Vector full = Vector::Zero(full_size());
  for (Index r = 0; r < reduced_size(); ++r) full[full_of_reduced[r]] = reduced[r];
  return full;
}

Vector DofMap::restrict(const Vector& full) const {
  if (full.size() != full_size()) throw StructuralError("full vector has wrong size");
  Vector reduced(reduced_size());
  for (Index r = 0; r < reduced_size(); ++r) reduced[r] = full[full_of_reduced[r]];
  return reduced;
}

Matrix DofMap::restrict(const Matrix& full) const {
  if (full.rows() != full_size() || full.cols() != full_size()) {
    throw StructuralError("full matrix has wrong size");
  }
  const Index m = reduced_size();
  Matrix reduced(m, m);
  for (Index c = 0; c < m; ++c) {
    for (Index r = 0; r < m; ++r) reduced(r, c) = full(full_of_reduced[r], full_of_reduced[c]);
  }
  return reduced;
}

DofMap make_dof_map(const Mesh& mesh) {
  DofMap map;
  map.reduced_of_full.assign(static_cast<std::size_t>(2 * mesh.node_count()), -1);
  for (Index n = 0; n < mesh.node_count(); ++n) {
    if (mesh.tags[n] == BoundaryPart::kClamped) continue;
    for (Index k = 0; k < 2; ++k) {
      map.reduced_of_full[2 * n + k] = map.reduced_size();
      map.full_of_reduced.push_back(2 * n + k);
    }
  }
  return map;
}

}  // namespace proxbundle::fem
