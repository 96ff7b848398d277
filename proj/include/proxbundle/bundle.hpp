#pragma once

#include <functional>
#include <string>
#include <vector>

#include "proxbundle/oracle.hpp"
#include "proxbundle/problem.hpp"
#include "proxbundle/tangent_qp.hpp"

namespace proxbundle {

struct DriverParams {
  double gamma = 0.01;        // acceptance threshold for serious steps
  double Gamma = 0.6;         // "good" threshold for halving the memory element
  double gamma_tilde = 0.5;   // secondary test threshold for doubling tau
  double q = 1e6;             // curvature bound -qI <= Q <= qI
  double T = 1e8;             // cap on the memory element
  double tol1 = 1e-5;         // relative step tolerance
  double tol2 = 1e-5;         // relative value tolerance
  int k_max = 50;             // inner iterations per serious step
  int j_max = 500;            // serious steps
  std::size_t plane_budget = WorkingModel::kDefaultPlaneBudget;
  int small_null_steps = 5;   // consecutive small null steps that end the inner loop
  double tau_overflow = 1e30;

  /// Throws ConfigError naming the first violated ordering constraint.
  void validate() const;
};

struct ProxState {
  double tau = 1.0;     // current proximity parameter
  double memory = 1.0;  // memory element carried between serious steps
};

enum class StopReason {
  kSmallSeriousStep,  // accepted step below tol1/tol2
  kSmallNullSteps,    // consecutive null steps below tol1/tol2
  kInnerLimit,        // k_max inner iterations
  kModelStationary,   // trial step equals the serious iterate
  kOuterLimit,        // j_max serious steps
  kTauOverflow,
};

const char* to_string(StopReason reason);

/// One pass of the inner loop (one tangent program).
struct InnerRecord {
  int k = 0;
  double tau = 0.0;
  double trial_value = 0.0;   // f(y^k)
  double model_value = 0.0;   // Phi_k(y^k, x)
  double step_norm = 0.0;     // |y^k - x|
  double rho = 0.0;
  bool serious = false;
  // Null steps only.
  double rho_tilde = 0.0;
  double next_model_value = 0.0;  // Phi_{k+1}(y^k, x)
  double tau_next = 0.0;
  double aggregate_gap = 0.0;     // |m*(y^k) - phi_k(y^k)|
  bool downshift_selected = false;
  // Tangent program diagnostics.
  double kkt_residual = 0.0;
  int qp_iterations = 0;
  std::size_t planes = 0;
};

/// Outcome of one outer iteration j (a serious step or the final converged point).
struct SeriousRecord {
  int j = 0;
  Vector point;          // x^j
  double value = 0.0;    // f(x^j)
  double memory = 0.0;   // tau memory at the start of loop j
  std::vector<InnerRecord> inner;
  bool accepted = false;  // produced x^{j+1}
  double step_norm = 0.0;
  double rho = 0.0;
  double tau_final = 0.0;
  double next_value = 0.0;
  double memory_next = 0.0;
  bool memory_halved = false;
};

struct RunHistory {
  std::vector<SeriousRecord> iterations;
  StopReason stop_reason = StopReason::kOuterLimit;
  Vector final_point;
  double final_value = 0.0;
  /// |(Q + tau I)(y - x)| = |aggregate subgradient + A^T eta| from the last tangent program.
  double final_stationarity = 0.0;
  Vector final_constraint_multipliers;
  double downshift_coefficient = 0.0;
  int evaluations = 0;
  std::string failure;  // non-empty when the run aborted
};

// Ratio tests and parameter updates.
double acceptance_ratio(double f_x, double f_y, double model_y);
double secondary_ratio(double f_x, double next_model_y, double model_y);
double update_tau_inner(double tau, double rho_tilde, double gamma_tilde);
/// Memory element after an accepted step, raised so Q_next + tau I is positive
/// definite and capped at T.
double update_memory(double tau_final, double rho, const DriverParams& params,
                     const Matrix& next_curvature);
/// max(1, 1.1 max(0, -lambda_min(Q))).
double initial_memory(const Matrix& curvature);
/// Symmetric eigenvalue clipping of Q to [-q, q].
Matrix clip_curvature(const Matrix& raw, double q);

struct InnerLoopResult {
  bool serious = false;
  StopReason reason = StopReason::kModelStationary;  // when not serious
  PointData next;     // accepted point
  double rho = 0.0;
  double tau_final = 0.0;
  double last_stationarity = 0.0;
  Vector last_constraint_multipliers;
};

/// Proximity control bundle method for min f(x) subject to A x <= b.
class BundleSolver {
 public:
  using Callback = std::function<void(const SeriousRecord&)>;

  explicit BundleSolver(DriverParams params = {}, OracleConfig oracle = {});

  const DriverParams& params() const { return params_; }
  const OracleConfig& oracle() const { return oracle_; }

  /// Invoked synchronously after every outer iteration.
  void set_progress_callback(Callback cb) { callback_ = std::move(cb); }

  RunHistory solve(const Problem& problem, const Polyhedron& constraints, const Vector& x1);

  /// Inner loop at serious iterate `x`: tangent programs and model updates
  /// until a serious step is found or the practical stopping test fires.
  /// `record` receives one InnerRecord per tangent program.
  InnerLoopResult inner_loop(const Problem& problem, const PointData& x, WorkingModel& model,
                             ProxState& prox, TangentSolver& solver, double c,
                             SeriousRecord& record, int& evaluations) const;

 private:
  Matrix curvature_at(const Problem& problem, const Vector& x) const;

  DriverParams params_;
  OracleConfig oracle_;
  Callback callback_;
};

}  // namespace proxbundle
