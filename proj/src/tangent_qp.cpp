#include "proxbundle/tangent_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace proxbundle {

Polyhedron Polyhedron::unconstrained(Index n) { return {Matrix(0, n), Vector(0)}; }

Polyhedron Polyhedron::box(const Vector& lower, const Vector& upper) {
  const Index n = lower.size();
  if (upper.size() != n) throw StructuralError("box bounds have different dimensions");
  Polyhedron p{Matrix::Zero(2 * n, n), Vector(2 * n)};
  for (Index i = 0; i < n; ++i) {
    p.A(i, i) = 1.0;
    p.b[i] = upper[i];
    p.A(n + i, i) = -1.0;
    p.b[n + i] = -lower[i];
  }
  return p;
}

double Polyhedron::violation(const Vector& y) const {
  if (rows() == 0) return 0.0;
  return std::max(0.0, (A * y - b).maxCoeff());
}

double KktReport::max() const {
  return std::max({stationarity, simplex, primal, complementarity, dual_sign});
}

bool check_positive_definite(const Matrix& Q, double tau) {
  if (Q.size() == 0) return tau > 1e-12;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() + tau > 1e-12;
}

TangentSolver::TangentSolver(Polyhedron constraints) : constraints_(std::move(constraints)) {
  if (constraints_.A.rows() != constraints_.b.size()) {
    throw StructuralError("constraint matrix and right-hand side differ in length");
  }
  row_columns_.resize(static_cast<std::size_t>(constraints_.rows()));
}

void TangentSolver::refresh_factorization(const WorkingModel& model, double tau) {
  const bool same_point =
      cached_point_.size() == model.dimension() && cached_point_ == model.serious_point();
  const bool same_matrix = llt_.has_value() && same_point && cached_tau_ == tau &&
                           cached_curvature_.rows() == model.dimension() &&
                           cached_curvature_ == model.curvature();
  if (!same_point) {
    last_step_.reset();
    last_rows_.clear();
    cached_point_ = model.serious_point();
  }
  if (same_matrix) return;

  Matrix H = model.curvature();
  H.diagonal().array() += tau;
  llt_.emplace(H);
  ++factorizations_;
  if (llt_->info() != Eigen::Success || !check_positive_definite(model.curvature(), tau)) {
    llt_.reset();
    throw SolverFailure(fmt::format("Q + tau I is not positive definite (tau = {:.6g})", tau));
  }
  cached_curvature_ = model.curvature();
  cached_tau_ = tau;
  plane_columns_.clear();
  for (auto& c : row_columns_) c.reset();
}

const Vector& TangentSolver::plane_column(const WorkingModel& model, std::size_t i) {
  const Plane& p = model.planes()[i];
  auto it = plane_columns_.find(p.id);
  if (it == plane_columns_.end()) {
    it = plane_columns_.emplace(p.id, llt_->matrixL().solve(p.gradient)).first;
  }
  return it->second;
}

const Vector& TangentSolver::row_column(Index j) {
  auto& slot = row_columns_[static_cast<std::size_t>(j)];
  if (!slot) {
    slot = llt_->matrixL().solve(Vector(constraints_.A.row(j).transpose()));
  }
  return *slot;
}

TangentSolution TangentSolver::solve(const WorkingModel& model, double tau) {
  const Index n = model.dimension();
  const auto num_planes = static_cast<Index>(model.size());
  const Index num_rows = constraints_.rows();
  if (num_planes == 0) throw StructuralError("tangent program needs at least one plane");
  if (constraints_.dimension() != n && num_rows > 0) {
    throw StructuralError("constraint dimension does not match the model");
  }

  const Vector& x = model.serious_point();
  const Vector slack = num_rows > 0 ? Vector(constraints_.b - constraints_.A * x) : Vector(0);
  if (num_rows > 0) {
    const double scale = 1.0 + constraints_.b.cwiseAbs().maxCoeff();
    if (slack.minCoeff() < -1e-9 * scale) {
      throw InfeasibleError("serious point violates the constraints A y <= b");
    }
  }

  refresh_factorization(model, tau);

  // Offsets and gradients in compact form.
  Vector offsets(num_planes);
  Matrix gradients(n, num_planes);
  for (Index i = 0; i < num_planes; ++i) {
    offsets[i] = model.planes()[static_cast<std::size_t>(i)].offset;
    gradients.col(i) = model.planes()[static_cast<std::size_t>(i)].gradient;
  }

  // Feasible start: (d, t) with t the model value at d.
  Vector d = Vector::Zero(n);
  std::vector<WorkingEntry> working;
  if (last_step_ && last_step_->size() == n) {
    d = *last_step_;
    for (Index j : last_rows_) {
      const double h = constraints_.A.row(j).dot(d) - slack[j];
      if (std::abs(h) <= 1e-10 * (1.0 + std::abs(slack[j]))) working.push_back({false, j});
    }
  }
  Vector plane_vals = offsets + gradients.transpose() * d;
  Index top = 0;
  double t = plane_vals.maxCoeff(&top);
  working.insert(working.begin(), WorkingEntry{true, top});

  auto in_working = [&](bool is_plane, Index idx) {
    return std::any_of(working.begin(), working.end(), [&](const WorkingEntry& e) {
      return e.is_plane == is_plane && e.index == idx;
    });
  };

  const int max_iterations = static_cast<int>(10 * (num_planes + num_rows + n) + 100);
  Vector mu;
  int iter = 0;
  bool optimal = false;
  for (; iter < max_iterations; ++iter) {
    const auto m = static_cast<Index>(working.size());
    Matrix columns(n, m);
    Vector rhs(m + 1);
    for (Index k = 0; k < m; ++k) {
      const WorkingEntry& e = working[static_cast<std::size_t>(k)];
      if (e.is_plane) {
        columns.col(k) = plane_column(model, static_cast<std::size_t>(e.index));
        rhs[k] = offsets[e.index];
      } else {
        columns.col(k) = row_column(e.index);
        rhs[k] = -slack[e.index];
      }
    }
    rhs[m] = 1.0;
    Matrix kkt = Matrix::Zero(m + 1, m + 1);
    kkt.topLeftCorner(m, m) = columns.transpose() * columns;
    for (Index k = 0; k < m; ++k) {
      if (working[static_cast<std::size_t>(k)].is_plane) {
        kkt(k, m) = 1.0;
        kkt(m, k) = 1.0;
      }
    }
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) {
      throw SolverFailure("tangent program working set became linearly dependent");
    }
    const Vector sol = lu.solve(rhs);
    mu = sol.head(m);
    const double t_eqp = sol[m];
    const Vector d_eqp = -llt_->matrixU().solve(columns * mu);

    const Vector step_d = d_eqp - d;
    const double step_t = t_eqp - t;
    const bool zero_step = step_d.norm() <= 1e-12 * (1.0 + d.norm()) &&
                           std::abs(step_t) <= 1e-12 * (1.0 + std::abs(t));
    if (zero_step) {
      d = d_eqp;
      t = t_eqp;
      // Most negative multiplier, rows scaled by their norm.
      Index worst = -1;
      double worst_value = 0.0;
      const double mu_scale = std::max(1.0, mu.cwiseAbs().maxCoeff());
      for (Index k = 0; k < m; ++k) {
        const WorkingEntry& e = working[static_cast<std::size_t>(k)];
        double value = mu[k];
        if (!e.is_plane) value /= std::max(1e-300, constraints_.A.row(e.index).norm());
        if (value < worst_value && mu[k] < -1e-12 * mu_scale) {
          worst_value = value;
          worst = k;
        }
      }
      if (worst < 0) {
        optimal = true;
        break;
      }
      working.erase(working.begin() + worst);
      continue;
    }

    // Normals of the working constraints in the variables (L^T d, t).
    Matrix normals(n + 1, m);
    normals.topRows(n) = columns;
    for (Index k = 0; k < m; ++k) {
      normals(n, k) = working[static_cast<std::size_t>(k)].is_plane ? -1.0 : 0.0;
    }
    std::optional<Eigen::ColPivHouseholderQR<Matrix>> normals_qr;
    // A constraint whose normal lies in the span of the working normals has zero
    // slope along the step in exact arithmetic; rounding must not let it block.
    auto independent = [&](const WorkingEntry& e) {
      Vector v(n + 1);
      if (e.is_plane) {
        v.head(n) = plane_column(model, static_cast<std::size_t>(e.index));
        v[n] = -1.0;
      } else {
        v.head(n) = row_column(e.index);
        v[n] = 0.0;
      }
      if (!normals_qr) normals_qr.emplace(normals);
      const Vector residual = v - normals * normals_qr->solve(v);
      return residual.norm() > 1e-9 * v.norm();
    };

    // Ratio test over constraints outside the working set.
    double alpha = 1.0;
    std::optional<WorkingEntry> blocking;
    std::vector<WorkingEntry> excluded;
    auto is_excluded = [&](bool is_plane, Index idx) {
      return std::any_of(excluded.begin(), excluded.end(), [&](const WorkingEntry& e) {
        return e.is_plane == is_plane && e.index == idx;
      });
    };
    const double step_norm = step_d.norm();
    while (true) {
      alpha = 1.0;
      blocking.reset();
      for (Index i = 0; i < num_planes; ++i) {
        if (in_working(true, i) || is_excluded(true, i)) continue;
        const double slope = gradients.col(i).dot(step_d) - step_t;
        const double slope_tol =
            1e-12 * (gradients.col(i).norm() * step_norm + std::abs(step_t));
        if (slope <= slope_tol) continue;
        const double h = std::min(0.0, offsets[i] + gradients.col(i).dot(d) - t);
        const double a = -h / slope;
        if (a < alpha) {
          alpha = a;
          blocking = WorkingEntry{true, i};
        }
      }
      for (Index j = 0; j < num_rows; ++j) {
        if (in_working(false, j) || is_excluded(false, j)) continue;
        const double slope = constraints_.A.row(j).dot(step_d);
        if (slope <= 1e-12 * constraints_.A.row(j).norm() * step_norm) continue;
        const double h = std::min(0.0, constraints_.A.row(j).dot(d) - slack[j]);
        const double a = -h / slope;
        if (a < alpha) {
          alpha = a;
          blocking = WorkingEntry{false, j};
        }
      }
      if (!blocking || independent(*blocking)) break;
      excluded.push_back(*blocking);
    }
    d += alpha * step_d;
    t += alpha * step_t;
    if (blocking) working.push_back(*blocking);
  }
  if (!optimal) {
    throw SolverFailure(fmt::format("tangent program did not converge in {} iterations", iter));
  }

  TangentSolution out;
  out.iterations = iter + 1;
  out.multipliers.plane_multipliers = Vector::Zero(num_planes);
  out.multipliers.constraint_multipliers = Vector::Zero(num_rows);
  last_rows_.clear();
  for (std::size_t k = 0; k < working.size(); ++k) {
    const WorkingEntry& e = working[k];
    const double value = std::max(0.0, mu[static_cast<Index>(k)]);
    if (e.is_plane) {
      out.multipliers.plane_multipliers[e.index] = value;
    } else {
      out.multipliers.constraint_multipliers[e.index] = value;
      last_rows_.push_back(e.index);
    }
  }
  last_step_ = d;

  out.trial_point = x + d;
  out.first_order_value = model.eval_first_order(out.trial_point);
  out.model_value = out.first_order_value + 0.5 * d.dot(model.curvature() * d);
  out.kkt_residual = kkt_report(model, tau, out).max();
  return out;
}

KktReport TangentSolver::kkt_report(const WorkingModel& model, double tau,
                                    const TangentSolution& sol) const {
  KktReport r;
  const Vector& x = model.serious_point();
  const Vector d = sol.trial_point - x;
  const Vector& lambda = sol.multipliers.plane_multipliers;
  const Vector& eta = sol.multipliers.constraint_multipliers;
  const Index n = model.dimension();

  Vector hd = model.curvature() * d + tau * d;
  Vector agg = Vector::Zero(n);
  double simplex_sum = 0.0;
  const double t = model.eval_first_order(sol.trial_point);
  double compl_planes = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double l = lambda[static_cast<Index>(i)];
    agg += l * model.planes()[i].gradient;
    simplex_sum += l;
    compl_planes += std::abs(l) * (t - model.plane_value(i, sol.trial_point));
  }
  Vector row_term = Vector::Zero(n);
  double compl_rows = 0.0;
  double primal = 0.0;
  const Index rows = constraints_.rows();
  if (rows > 0) {
    row_term = constraints_.A.transpose() * eta;
    const Vector residual = constraints_.A * sol.trial_point - constraints_.b;
    const double b_scale = 1.0 + constraints_.b.cwiseAbs().maxCoeff();
    primal = std::max(0.0, residual.maxCoeff()) / b_scale;
    compl_rows = eta.cwiseAbs().dot(residual.cwiseAbs());
  }
  const double grad_scale = std::max({1.0, hd.norm(), agg.norm(), row_term.norm()});
  r.stationarity = (hd + agg + row_term).norm() / grad_scale;
  r.simplex = std::abs(1.0 - simplex_sum);
  r.primal = primal;
  const double obj_scale = 1.0 + std::abs(t) + std::abs(model.serious_value());
  r.complementarity = (compl_planes + compl_rows) / obj_scale;
  double dual = 0.0;
  if (lambda.size() > 0) dual = std::max(dual, -lambda.minCoeff());
  if (eta.size() > 0) dual = std::max(dual, -eta.minCoeff() / (1.0 + eta.cwiseAbs().maxCoeff()));
  r.dual_sign = std::max(0.0, dual);
  return r;
}

}  // namespace proxbundle
