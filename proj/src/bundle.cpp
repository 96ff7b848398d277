#include "proxbundle/bundle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace proxbundle {

void DriverParams::validate() const {
  if (!(0.0 < gamma && gamma < Gamma && Gamma < 1.0)) {
    throw ConfigError(fmt::format("need 0 < gamma < Gamma < 1, got gamma = {}, Gamma = {}", gamma,
                                  Gamma));
  }
  if (!(gamma < gamma_tilde && gamma_tilde < 1.0)) {
    throw ConfigError(fmt::format("need gamma < gamma_tilde < 1, got gamma = {}, gamma_tilde = {}",
                                  gamma, gamma_tilde));
  }
  if (!(0.0 < q && q < T)) {
    throw ConfigError(fmt::format("need 0 < q < T, got q = {}, T = {}", q, T));
  }
  if (!(tol1 > 0.0 && tol2 > 0.0)) throw ConfigError("stopping tolerances must be positive");
  if (k_max < 1 || j_max < 1) throw ConfigError("iteration caps must be positive");
  if (plane_budget < 4) throw ConfigError("plane budget must be at least 4");
  if (small_null_steps < 1) throw ConfigError("small_null_steps must be positive");
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kSmallSeriousStep:
      return "small_serious_step";
    case StopReason::kSmallNullSteps:
      return "small_null_steps";
    case StopReason::kInnerLimit:
      return "inner_limit";
    case StopReason::kModelStationary:
      return "model_stationary";
    case StopReason::kOuterLimit:
      return "outer_limit";
    case StopReason::kTauOverflow:
      return "tau_overflow";
  }
  return "unknown";
}

double acceptance_ratio(double f_x, double f_y, double model_y) {
  const double denom = f_x - model_y;
  if (!(denom > 0.0)) {
    throw StructuralError("acceptance ratio with nonpositive predicted decrease");
  }
  return (f_x - f_y) / denom;
}

double secondary_ratio(double f_x, double next_model_y, double model_y) {
  const double denom = f_x - model_y;
  if (!(denom > 0.0)) {
    throw StructuralError("secondary ratio with nonpositive predicted decrease");
  }
  return (f_x - next_model_y) / denom;
}

double update_tau_inner(double tau, double rho_tilde, double gamma_tilde) {
  return rho_tilde >= gamma_tilde ? 2.0 * tau : tau;
}

namespace {

// Subgradient for an exactness plane at a serious point: the one attaining
// f0(x, -g) for the reported subgradient g. At a kink this is an active branch
// gradient rather than their average, which may vanish at a non-minimizer.
Vector exactness_gradient(const Problem& problem, const PointData& x) {
  return attaining_or_fallback(problem, x, -x.subgradient);
}

double min_eigenvalue(const Matrix& Q) {
  if (Q.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

double update_memory(double tau_final, double rho, const DriverParams& params,
                     const Matrix& next_curvature) {
  double memory = rho >= params.Gamma ? 0.5 * tau_final : tau_final;
  const double lmin = min_eigenvalue(next_curvature);
  if (lmin + memory <= 1e-12) memory = 1.1 * (-lmin);
  return std::min(memory, params.T);
}

double initial_memory(const Matrix& curvature) {
  return std::max(1.0, 1.1 * std::max(0.0, -min_eigenvalue(curvature)));
}

Matrix clip_curvature(const Matrix& raw, double q) {
  if (raw.size() == 0) return raw;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(raw);
  const Vector& ev = eig.eigenvalues();
  if (ev.minCoeff() >= -q && ev.maxCoeff() <= q) return raw;
  const Vector clipped = ev.cwiseMax(-q).cwiseMin(q);
  const Matrix& V = eig.eigenvectors();
  Matrix out = V * clipped.asDiagonal() * V.transpose();
  return 0.5 * (out + out.transpose());
}

BundleSolver::BundleSolver(DriverParams params, OracleConfig oracle)
    : params_(params), oracle_(oracle) {
  params_.validate();
}

Matrix BundleSolver::curvature_at(const Problem& problem, const Vector& x) const {
  const Index n = problem.dimension();
  std::optional<Matrix> Q = problem.curvature(x);
  if (!Q) return Matrix::Zero(n, n);
  if (Q->rows() != n || Q->cols() != n) throw StructuralError("curvature has wrong size");
  Matrix sym = 0.5 * (*Q + Q->transpose());
  return clip_curvature(sym, params_.q);
}

InnerLoopResult BundleSolver::inner_loop(const Problem& problem, const PointData& x,
                                         WorkingModel& model, ProxState& prox,
                                         TangentSolver& solver, double c, SeriousRecord& record,
                                         int& evaluations) const {
  InnerLoopResult result;
  const double x_norm = x.point.norm();
  int small_nulls = 0;

  for (int k = 1; k <= params_.k_max; ++k) {
    if (prox.tau > params_.tau_overflow) {
      throw SolverFailure(fmt::format("proximity parameter overflow (tau = {:.3g}) at k = {}",
                                      prox.tau, k));
    }
    const TangentSolution sol = solver.solve(model, prox.tau);
    const Vector step = sol.trial_point - x.point;

    InnerRecord rec;
    rec.k = k;
    rec.tau = prox.tau;
    rec.model_value = sol.model_value;
    rec.step_norm = step.norm();
    rec.kkt_residual = sol.kkt_residual;
    rec.qp_iterations = sol.iterations;
    rec.planes = model.size();

    result.tau_final = prox.tau;
    result.last_stationarity = (model.curvature() * step + prox.tau * step).norm();
    result.last_constraint_multipliers = sol.multipliers.constraint_multipliers;

    const double predicted = x.value - sol.model_value;
    if (rec.step_norm == 0.0 || !(predicted > 0.0)) {
      rec.trial_value = x.value;
      record.inner.push_back(rec);
      result.reason = StopReason::kModelStationary;
      return result;
    }

    PointData y = evaluate(problem, sol.trial_point);
    ++evaluations;
    rec.trial_value = y.value;
    rec.rho = acceptance_ratio(x.value, y.value, sol.model_value);

    if (rec.rho >= params_.gamma) {
      rec.serious = true;
      record.inner.push_back(rec);
      result.serious = true;
      result.next = std::move(y);
      result.rho = rec.rho;
      return result;
    }

    // Null step.
    const bool small = rec.step_norm / (1.0 + x_norm) < params_.tol1 &&
                       std::abs(y.value - x.value) / (1.0 + std::abs(x.value)) < params_.tol2;
    small_nulls = small ? small_nulls + 1 : 0;

    std::vector<std::uint64_t> active_ids;
    std::vector<std::pair<double, std::uint64_t>> weighted;
    for (std::size_t i = 0; i < model.size(); ++i) {
      const double l = sol.multipliers.plane_multipliers[static_cast<Index>(i)];
      if (l > 1e-10) weighted.emplace_back(l, model.planes()[i].id);
    }
    std::sort(weighted.begin(), weighted.end(), std::greater<>());

    const Plane agg = aggregate_plane(model, sol.multipliers);
    rec.aggregate_gap =
        std::abs(agg.offset + agg.gradient.dot(step) - sol.first_order_value);

    std::vector<std::uint64_t> protect;
    protect.push_back(model.add(agg));

    const Vector g_attain = attaining_or_fallback(problem, x, step);
    const ModifiedCut cut = modified_plane(x, y, g_attain, c);
    rec.downshift_selected = cut.used_downshift;
    switch (oracle_.variant) {
      case OracleVariant::kStandard: {
        Plane p = cut.standard;
        p.tag = PlaneTag::kExactness;
        protect.push_back(model.add(std::move(p)));
        break;
      }
      case OracleVariant::kDownshift:
        protect.push_back(model.add(cut.downshift));
        break;
      case OracleVariant::kModified: {
        Plane p = cut.standard;
        p.tag = PlaneTag::kExactness;
        protect.push_back(model.add(std::move(p)));
        protect.push_back(model.add(cut.downshift));
        break;
      }
    }
    // Newest exactness plane.
    std::uint64_t newest_exact = 0;
    for (const Plane& p : model.planes()) {
      if (p.tag == PlaneTag::kExactness) newest_exact = std::max(newest_exact, p.id);
    }
    if (newest_exact == 0) throw StructuralError("working model lost its exactness plane");
    protect.push_back(newest_exact);
    std::sort(protect.begin(), protect.end());
    protect.erase(std::unique(protect.begin(), protect.end()), protect.end());
    for (const auto& [l, id] : weighted) {
      if (protect.size() >= params_.plane_budget) break;
      if (std::find(protect.begin(), protect.end(), id) == protect.end()) protect.push_back(id);
    }
    model.prune(protect);

    rec.next_model_value = model.eval_second_order(sol.trial_point);
    rec.rho_tilde = secondary_ratio(x.value, rec.next_model_value, sol.model_value);
    rec.tau_next = update_tau_inner(prox.tau, rec.rho_tilde, params_.gamma_tilde);
    record.inner.push_back(rec);
    prox.tau = rec.tau_next;

    if (small_nulls >= params_.small_null_steps) {
      result.reason = StopReason::kSmallNullSteps;
      return result;
    }
  }
  result.reason = StopReason::kInnerLimit;
  return result;
}

RunHistory BundleSolver::solve(const Problem& problem, const Polyhedron& constraints,
                               const Vector& x1) {
  const Index n = problem.dimension();
  if (x1.size() != n) throw StructuralError("start point has wrong dimension");
  if (constraints.rows() > 0 && constraints.dimension() != n) {
    throw StructuralError("constraints have wrong dimension");
  }
  if (!constraints.contains(x1, 1e-9 * (1.0 + (constraints.rows() > 0
                                                    ? constraints.b.cwiseAbs().maxCoeff()
                                                    : 0.0)))) {
    throw InfeasibleError("start point violates A x <= b");
  }

  RunHistory history;
  PointData x = evaluate(problem, x1);
  history.evaluations = 1;
  const double c = oracle_.downshift_coefficient > 0.0
                       ? oracle_.downshift_coefficient
                       : default_downshift_coefficient(x.value, x.point);
  history.downshift_coefficient = c;

  Matrix Q = curvature_at(problem, x.point);
  double memory = initial_memory(Q);
  WorkingModel model(x.point, x.value, Q, params_.plane_budget);
  {
    Plane exact;
    exact.offset = x.value;
    exact.gradient = exactness_gradient(problem, x);
    exact.tag = PlaneTag::kExactness;
    exact.origin = x.point;
    model.add(std::move(exact));
  }
  TangentSolver solver(constraints);

  history.stop_reason = StopReason::kOuterLimit;
  for (int j = 1; j <= params_.j_max; ++j) {
    SeriousRecord rec;
    rec.j = j;
    rec.point = x.point;
    rec.value = x.value;
    rec.memory = memory;
    ProxState prox{memory, memory};

    InnerLoopResult inner;
    try {
      inner = inner_loop(problem, x, model, prox, solver, c, rec, history.evaluations);
    } catch (const SolverFailure& e) {
      if (prox.tau <= params_.tau_overflow) throw;
      history.iterations.push_back(std::move(rec));
      history.stop_reason = StopReason::kTauOverflow;
      history.failure = e.what();
      history.final_point = x.point;
      history.final_value = x.value;
      return history;
    }
    history.final_stationarity = inner.last_stationarity;
    history.final_constraint_multipliers = inner.last_constraint_multipliers;

    if (!inner.serious) {
      history.iterations.push_back(std::move(rec));
      if (callback_) callback_(history.iterations.back());
      history.stop_reason = inner.reason;
      history.final_point = x.point;
      history.final_value = x.value;
      return history;
    }

    PointData next = std::move(inner.next);
    rec.accepted = true;
    rec.step_norm = (next.point - x.point).norm();
    rec.rho = inner.rho;
    rec.tau_final = inner.tau_final;
    rec.next_value = next.value;
    const Matrix Q_next = curvature_at(problem, next.point);
    rec.memory_next = update_memory(inner.tau_final, inner.rho, params_, Q_next);
    rec.memory_halved = inner.rho >= params_.Gamma;

    const bool small_step =
        rec.step_norm / (1.0 + x.point.norm()) < params_.tol1 &&
        std::abs(next.value - x.value) / (1.0 + std::abs(x.value)) < params_.tol2;

    history.iterations.push_back(std::move(rec));
    if (callback_) callback_(history.iterations.back());

    if (small_step) {
      history.stop_reason = StopReason::kSmallSeriousStep;
      history.final_point = next.point;
      history.final_value = next.value;
      return history;
    }

    // Next working model: recycled planes, then a fresh exactness plane.
    const Vector back = x.point - next.point;
    const Vector g0 = attaining_or_fallback(problem, next, back);
    std::vector<Plane> moved = recycle(model.planes(), x.point, next, g0, c);
    WorkingModel next_model(next.point, next.value, Q_next, params_.plane_budget);
    next_model.set_next_id(model.next_id());
    for (Plane& p : moved) next_model.add(std::move(p));
    Plane exact;
    exact.offset = next.value;
    exact.gradient = exactness_gradient(problem, next);
    exact.tag = PlaneTag::kExactness;
    exact.origin = next.point;
    const std::uint64_t fresh = next_model.add(std::move(exact));
    const std::uint64_t keep[] = {fresh};
    next_model.prune(keep);

    model = std::move(next_model);
    memory = history.iterations.back().memory_next;
    x = std::move(next);
  }
  history.final_point = x.point;
  history.final_value = x.value;
  return history;
}

}  // namespace proxbundle
