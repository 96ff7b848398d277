#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "proxbundle/bundle.hpp"
#include "proxbundle/piecewise.hpp"
#include "support.hpp"

using namespace proxbundle;
using testing::mat;
using testing::vec;

namespace {

PiecewiseQuadratic abs_value() {
  return PiecewiseQuadratic({{mat(1, 1, {0}), vec({1}), 0}, {mat(1, 1, {0}), vec({-1}), 0}},
                            Combiner::kMax);
}

bool practical_stop(StopReason r) {
  return r != StopReason::kOuterLimit && r != StopReason::kTauOverflow;
}

void check_history_invariants(const RunHistory& h, const Polyhedron& con,
                              const DriverParams& params) {
  for (const SeriousRecord& rec : h.iterations) {
    CHECK(con.violation(rec.point) <= 1e-9);
    for (std::size_t k = 0; k < rec.inner.size(); ++k) {
      const InnerRecord& in = rec.inner[k];
      CHECK(in.tau >= rec.memory);
      if (k > 0) CHECK(in.tau >= rec.inner[k - 1].tau);
      if (!in.serious && in.step_norm > 0.0) {
        CHECK(in.rho_tilde <= 1.0 + 1e-8);
        CHECK(in.tau_next == (in.rho_tilde >= params.gamma_tilde ? 2.0 * in.tau : in.tau));
      }
    }
    if (rec.accepted) {
      CHECK(rec.next_value < rec.value);
      CHECK(rec.rho >= params.gamma);
      CHECK(rec.memory_next <= params.T);
      CHECK(rec.memory_halved == (rec.rho >= params.Gamma));
    }
  }
}

}  // namespace

TEST_CASE("acceptance_ratio examples") {
  CHECK(acceptance_ratio(1.0, 0.25, 0.25) == doctest::Approx(1.0));
  CHECK(acceptance_ratio(1.0, 0.5, 0.0) == doctest::Approx(0.5));
  CHECK(acceptance_ratio(1.0, 1.5, 0.0) < 0.0);
}

TEST_CASE("secondary_ratio examples") {
  CHECK(secondary_ratio(1.0, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK(secondary_ratio(1.0, 1.0, 0.0) == doctest::Approx(0.0));
  CHECK(secondary_ratio(1.0, 0.8, 0.0) == doctest::Approx(0.2));
}

TEST_CASE("update_tau_inner examples") {
  CHECK(update_tau_inner(3.0, 0.9, 0.5) == 6.0);
  CHECK(update_tau_inner(3.0, 0.1, 0.5) == 3.0);
  CHECK(update_tau_inner(3.0, 0.5, 0.5) == 6.0);
}

TEST_CASE("update_memory examples") {
  DriverParams p;
  const Matrix zero = Matrix::Zero(2, 2);
  CHECK(update_memory(4.0, p.Gamma, p, zero) == doctest::Approx(2.0));
  CHECK(update_memory(4.0, 0.5 * (p.gamma + p.Gamma), p, zero) == doctest::Approx(4.0));
  CHECK(update_memory(2.0 * p.T, 0.5 * (p.gamma + p.Gamma), p, zero) == p.T);
  // Raised until Q + tau I is positive definite.
  const double raised = update_memory(4.0, 0.9, p, mat(2, 2, {-5, 0, 0, 1}));
  CHECK(raised > 5.0);
  CHECK(check_positive_definite(mat(2, 2, {-5, 0, 0, 1}), raised));
}

TEST_CASE("initial_memory and clip_curvature") {
  CHECK(initial_memory(Matrix::Zero(2, 2)) == 1.0);
  CHECK(initial_memory(mat(2, 2, {-4, 0, 0, 1})) == doctest::Approx(4.4));
  const double q = 10.0;
  const Matrix inside = mat(2, 2, {2, 1, 1, -3});
  CHECK((clip_curvature(inside, q) - inside).norm() < 1e-12);
  CHECK((clip_curvature(mat(2, 2, {3 * q, 0, 0, 0}), q) - mat(2, 2, {q, 0, 0, 0})).norm() < 1e-12);
  CHECK(clip_curvature(Matrix::Zero(3, 3), q).norm() == 0.0);
}

TEST_CASE("DriverParams ordering is validated") {
  DriverParams p;
  CHECK_NOTHROW(p.validate());
  p.Gamma = p.gamma;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = DriverParams{};
  p.gamma_tilde = 0.005;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = DriverParams{};
  p.T = 0.5 * p.q;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("smooth quadratic with exact curvature accepts the first trial") {
  testing::Quadratic f(mat(2, 2, {3, 1, 1, 2}), vec({-1, 4}));
  DriverParams params;
  BundleSolver solver(params);
  const Polyhedron con = Polyhedron::unconstrained(2);
  RunHistory h = solver.solve(f, con, vec({5, 5}));
  REQUIRE(!h.iterations.empty());
  REQUIRE(!h.iterations[0].inner.empty());
  CHECK(h.iterations[0].inner[0].serious);
  CHECK(h.iterations[0].inner[0].rho == doctest::Approx(1.0).epsilon(1e-6));
  const Vector exact = f.H.ldlt().solve(-f.p);
  CHECK((h.final_point - exact).norm() <= 1e-5 * (1.0 + exact.norm()));
  CHECK(practical_stop(h.stop_reason));
}

TEST_CASE("convex quadratic without curvature information") {
  std::mt19937_64 rng(3);
  const Matrix H = testing::random_spd(rng, 4, 1.0);
  const Vector p = testing::random_vector(rng, 4, -1, 1);
  testing::Quadratic f(H, p);
  f.with_curvature = false;
  BundleSolver solver;
  RunHistory h = solver.solve(f, Polyhedron::unconstrained(4), Vector::Zero(4));
  const Vector exact = H.ldlt().solve(-p);
  CHECK((h.final_point - exact).norm() <= 1e-3 * (1.0 + exact.norm()));
  CHECK(practical_stop(h.stop_reason));
  check_history_invariants(h, Polyhedron::unconstrained(4), solver.params());
}

TEST_CASE("|u| from its minimizer stops immediately") {
  const PiecewiseQuadratic f = abs_value();
  BundleSolver solver;
  RunHistory h = solver.solve(f, Polyhedron::unconstrained(1), vec({0}));
  CHECK(h.final_point[0] == 0.0);
  CHECK(h.final_value == 0.0);
  CHECK(practical_stop(h.stop_reason));
  for (const SeriousRecord& rec : h.iterations) CHECK_FALSE(rec.accepted);
}

TEST_CASE("min(u, -u) from its maximizer leaves the kink") {
  const PiecewiseQuadratic f(
      {{mat(1, 1, {0}), vec({1}), 0}, {mat(1, 1, {0}), vec({-1}), 0}}, Combiner::kMin);
  BundleSolver solver;
  const Polyhedron box = Polyhedron::box(vec({-1}), vec({1}));
  RunHistory h = solver.solve(f, box, vec({0}));
  REQUIRE(!h.iterations.empty());
  CHECK(h.iterations[0].accepted);
  CHECK(h.iterations[0].next_value < 0.0);
  CHECK(h.final_value == doctest::Approx(-1.0));
}

TEST_CASE("max(u1^2 + u2, -u2) matches a grid search") {
  const PiecewiseQuadratic f({{mat(2, 2, {2, 0, 0, 0}), vec({0, 1}), 0},
                              {Matrix::Zero(2, 2), vec({0, -1}), 0}},
                             Combiner::kMax);
  const Vector lo = vec({-2, -2}), hi = vec({2, 2});
  BundleSolver solver;
  const Polyhedron box = Polyhedron::box(lo, hi);
  RunHistory h = solver.solve(f, box, vec({1.5, 1.0}));
  const GridOracleResult ref = grid_oracle(f, lo, hi, 1e-3);
  const double tol = 1e-3 * f.lipschitz_bound(lo, hi);
  CHECK(h.final_value <= ref.value + tol);
  CHECK(practical_stop(h.stop_reason));
  check_history_invariants(h, box, solver.params());
}

TEST_CASE("infeasible start is rejected") {
  testing::Quadratic f(mat(1, 1, {1}), vec({0}));
  BundleSolver solver;
  CHECK_THROWS_AS(solver.solve(f, Polyhedron::box(vec({0}), vec({1})), vec({2})),
                  InfeasibleError);
}

TEST_CASE("progress callback sees every outer iteration") {
  testing::Quadratic f(mat(2, 2, {1, 0, 0, 10}), vec({1, 1}));
  f.with_curvature = false;
  BundleSolver solver;
  int calls = 0;
  solver.set_progress_callback([&](const SeriousRecord&) { ++calls; });
  RunHistory h = solver.solve(f, Polyhedron::unconstrained(2), vec({3, 3}));
  CHECK(calls == static_cast<int>(h.iterations.size()));
}

TEST_CASE("identical runs give identical histories") {
  const PiecewiseQuadratic f({{mat(2, 2, {2, 0, 0, 1}), vec({1, 0}), 0},
                              {mat(2, 2, {1, 0, 0, 3}), vec({0, -1}), 0.5},
                              {Matrix::Zero(2, 2), vec({0.3, 0.2}), -0.1}},
                             Combiner::kMax);
  const Polyhedron box = Polyhedron::box(vec({-2, -2}), vec({2, 2}));
  BundleSolver solver;
  RunHistory a = solver.solve(f, box, vec({1.9, -1.7}));
  RunHistory b = solver.solve(f, box, vec({1.9, -1.7}));
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t j = 0; j < a.iterations.size(); ++j) {
    CHECK(a.iterations[j].value == b.iterations[j].value);
    CHECK(a.iterations[j].point == b.iterations[j].point);
    REQUIRE(a.iterations[j].inner.size() == b.iterations[j].inner.size());
    for (std::size_t k = 0; k < a.iterations[j].inner.size(); ++k) {
      CHECK(a.iterations[j].inner[k].tau == b.iterations[j].inner[k].tau);
      CHECK(a.iterations[j].inner[k].trial_value == b.iterations[j].inner[k].trial_value);
    }
  }
  CHECK(a.final_point == b.final_point);
}
