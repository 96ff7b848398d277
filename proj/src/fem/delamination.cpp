#include "proxbundle/fem/delamination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace proxbundle::fem {

DelaminationModel::DelaminationModel(Mesh mesh, ElasticityParams params, AdhesiveLaw law,
                                     double F2)
    : mesh_(std::move(mesh)), params_(params), law_(std::move(law)), F2_(F2) {
  params_.validate();
  dofs_ = make_dof_map(mesh_);
  stiffness_ = dofs_.restrict(assemble_stiffness(mesh_, params_));
  load_ = dofs_.restrict(assemble_load(mesh_, F2_, params_.thickness));

  // Trapezoidal weights over the contact edges.
  std::vector<double> weight(static_cast<std::size_t>(mesh_.node_count()), 0.0);
  for (const BoundaryEdge& e : mesh_.edges) {
    if (e.part != BoundaryPart::kContact) continue;
    const double half = 0.5 * mesh_.edge_length(e);
    weight[e.a] += half;
    weight[e.b] += half;
  }
  for (Index n = 0; n < mesh_.node_count(); ++n) {
    if (weight[n] == 0.0) continue;
    if (mesh_.tags[n] == BoundaryPart::kContact) {
      contact_.push_back({n, dofs_.reduced_of_full[2 * n + 1], weight[n]});
    } else {
      closure_weight_ += weight[n];
    }
  }
}

double DelaminationModel::contact_length() const {
  double total = closure_weight_;
  for (const ContactNode& c : contact_) total += c.weight;
  return total;
}

Polyhedron DelaminationModel::contact_constraints() const {
  const auto rows = static_cast<Index>(contact_.size());
  Polyhedron p{Matrix::Zero(rows, dimension()), Vector::Zero(rows)};
  for (Index r = 0; r < rows; ++r) p.A(r, contact_[r].dof) = -1.0;
  return p;
}

double DelaminationEnergy::elastic_energy(const Vector& v) const {
  return 0.5 * v.dot(model_.stiffness() * v);
}

double DelaminationEnergy::adhesive_energy(const Vector& v) const {
  const AdhesiveLaw& law = model_.law();
  double total = model_.closure_weight() * law.value(0.0);
  for (const ContactNode& c : model_.contact_nodes()) total += c.weight * law.value(v[c.dof]);
  return total;
}

double DelaminationEnergy::load_work(const Vector& v) const { return model_.load().dot(v); }

double DelaminationEnergy::value(const Vector& v) const {
  if (v.size() != dimension()) throw StructuralError("displacement has wrong dimension");
  return elastic_energy(v) + adhesive_energy(v) - load_work(v);
}

Vector DelaminationEnergy::subgradient(const Vector& v) const {
  Vector g = model_.stiffness() * v - model_.load();
  const AdhesiveLaw& law = model_.law();
  for (const ContactNode& c : model_.contact_nodes()) {
    const double u = v[c.dof];
    const auto act = law.active(u);
    double slope = 0.0;
    for (std::size_t i : act) slope += law.pieces()[i].slope(u);
    g[c.dof] += c.weight * slope / static_cast<double>(act.size());
  }
  return g;
}

std::optional<Vector> DelaminationEnergy::attaining_subgradient(const Vector& v,
                                                                const Vector& d) const {
  Vector g = model_.stiffness() * v - model_.load();
  const AdhesiveLaw& law = model_.law();
  for (const ContactNode& c : model_.contact_nodes()) {
    const double u = v[c.dof];
    double best = -std::numeric_limits<double>::infinity();
    double best_slope = 0.0;
    for (std::size_t i : law.active(u)) {
      const double s = law.pieces()[i].slope(u);
      if (s * d[c.dof] > best) {
        best = s * d[c.dof];
        best_slope = s;
      }
    }
    g[c.dof] += c.weight * best_slope;
  }
  return g;
}

std::optional<Matrix> DelaminationEnergy::curvature(const Vector& v) const {
  Matrix Q = model_.stiffness();
  const AdhesiveLaw& law = model_.law();
  for (const ContactNode& c : model_.contact_nodes()) {
    Q(c.dof, c.dof) += c.weight * law.pieces()[law.active(v[c.dof]).front()].k;
  }
  return Q;
}

std::vector<ReactionSample> recover_reaction(const DelaminationModel& model, const Vector& v,
                                             double active_tol) {
  const Vector residual = model.stiffness() * v - model.load();
  const double t = model.params().thickness;
  const AdhesiveLaw& law = model.law();
  std::vector<ReactionSample> out;
  for (const ContactNode& c : model.contact_nodes()) {
    ReactionSample s;
    s.node = c.node;
    s.x = model.mesh().nodes[c.node].x();
    s.opening = v[c.dof];
    s.constraint_active = s.opening <= active_tol;
    s.residual_traction = -residual[c.dof] / (c.weight * t);
    s.pieces = law.active(s.opening);
    s.law_traction = law.pieces()[s.pieces.front()].slope(s.opening) / t;
    out.push_back(std::move(s));
  }
  return out;
}

double stationarity_residual(const DelaminationModel& model, const Vector& v, double delta) {
  Vector r = model.stiffness() * v - model.load();
  const AdhesiveLaw& law = model.law();
  for (const ContactNode& c : model.contact_nodes()) {
    const double u = v[c.dof];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i : law.active_near(u, delta)) {
      const double s = c.weight * law.pieces()[i].slope(u);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    // Clarke set of this component: [r + lo, r + hi], extended to -infinity by
    // the normal cone of an active constraint -v2 <= 0.
    double a = r[c.dof] + lo;
    const double b = r[c.dof] + hi;
    if (u <= delta) a = -std::numeric_limits<double>::infinity();
    r[c.dof] = a > 0.0 ? a : (b < 0.0 ? b : 0.0);
  }
  return r.norm();
}

double contact_violation(const DelaminationModel& model, const Vector& v) {
  double worst = 0.0;
  for (const ContactNode& c : model.contact_nodes()) worst = std::max(worst, -v[c.dof]);
  return worst;
}

}  // namespace proxbundle::fem
