#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "proxbundle/model.hpp"
#include "support.hpp"

using namespace proxbundle;
using testing::mat;
using testing::vec;

namespace {

Plane plane(double offset, Vector g, PlaneTag tag = PlaneTag::kCutting) {
  Plane p;
  p.offset = offset;
  p.gradient = std::move(g);
  p.tag = tag;
  return p;
}

}  // namespace

TEST_CASE("eval_first_order examples") {
  WorkingModel constant(vec({0.3, -1.0}), 1.0, Matrix::Zero(2, 2));
  constant.add(plane(1.0, vec({0, 0}), PlaneTag::kExactness));
  CHECK(constant.eval_first_order(vec({5, 7})) == doctest::Approx(1.0));

  WorkingModel abs_model(vec({0}), 0.0, Matrix::Zero(1, 1));
  abs_model.add(plane(0, vec({1}), PlaneTag::kExactness));
  abs_model.add(plane(0, vec({-1})));
  CHECK(abs_model.eval_first_order(vec({2})) == doctest::Approx(2.0));
  CHECK(abs_model.eval_first_order(vec({-3})) == doctest::Approx(3.0));

  WorkingModel two(vec({0, 0}), 1.0, Matrix::Zero(2, 2));
  two.add(plane(1, vec({1, 0}), PlaneTag::kExactness));
  two.add(plane(0, vec({0, 2})));
  CHECK(two.eval_first_order(vec({1, 1})) == doctest::Approx(2.0));
}

TEST_CASE("eval_first_order errors") {
  WorkingModel empty(vec({0}), 0.0, Matrix::Zero(1, 1));
  CHECK_THROWS_AS(empty.eval_first_order(vec({1})), StructuralError);
  empty.add(plane(0, vec({1}), PlaneTag::kExactness));
  CHECK_THROWS_AS(empty.eval_first_order(vec({1, 2})), StructuralError);
}

TEST_CASE("eval_second_order examples") {
  WorkingModel zero_q(vec({0, 0}), 1.0, Matrix::Zero(2, 2));
  zero_q.add(plane(1, vec({1, 0}), PlaneTag::kExactness));
  CHECK(zero_q.eval_second_order(vec({2, 1})) == zero_q.eval_first_order(vec({2, 1})));

  WorkingModel pure(vec({0, 0}), 0.0, 2.0 * Matrix::Identity(2, 2));
  pure.add(plane(0, vec({0, 0}), PlaneTag::kExactness));
  CHECK(pure.eval_second_order(vec({1, 1})) == doctest::Approx(2.0));

  WorkingModel indefinite(vec({0, 0}), 0.0, -Matrix::Identity(2, 2));
  indefinite.add(plane(0, vec({0, 0}), PlaneTag::kExactness));
  CHECK(indefinite.eval_second_order(vec({2, 0})) == doctest::Approx(-2.0));
}

TEST_CASE("model construction rejects bad data") {
  CHECK_THROWS_AS(WorkingModel(vec({0, 0}), 0.0, mat(2, 2, {1, 2, 0, 1})), StructuralError);
  CHECK_THROWS_AS(WorkingModel(vec({0, 0}), 0.0, Matrix::Zero(3, 3)), StructuralError);
  WorkingModel m(vec({0}), 1.0, Matrix::Zero(1, 1));
  CHECK_THROWS_AS(m.add(plane(1.5, vec({1}))), StructuralError);
  CHECK_THROWS_AS(m.add(plane(0.5, vec({1}), PlaneTag::kExactness)), StructuralError);
  CHECK_THROWS_AS(m.add(plane(0.0, vec({1, 1}))), StructuralError);
}

TEST_CASE("planes with equal gradients merge") {
  WorkingModel m(vec({0}), 1.0, Matrix::Zero(1, 1));
  const auto a = m.add(plane(0.2, vec({1})));
  const auto b = m.add(plane(1.0, vec({1}), PlaneTag::kExactness));
  CHECK(a == b);
  CHECK(m.size() == 1);
  CHECK(m.planes()[0].offset == 1.0);
  CHECK(m.has_exactness_plane());
}

TEST_CASE("aggregate_plane examples") {
  WorkingModel abs_model(vec({0}), 0.0, Matrix::Zero(1, 1));
  abs_model.add(plane(0, vec({1}), PlaneTag::kExactness));
  abs_model.add(plane(0, vec({-1})));

  MultiplierSet first{vec({1, 0}), Vector(0)};
  Plane copy = aggregate_plane(abs_model, first);
  CHECK(copy.offset == 0.0);
  CHECK(copy.gradient[0] == 1.0);
  CHECK(copy.tag == PlaneTag::kAggregate);

  MultiplierSet half{vec({0.5, 0.5}), Vector(0)};
  Plane avg = aggregate_plane(abs_model, half);
  CHECK(avg.offset == doctest::Approx(0.0));
  CHECK(avg.gradient[0] == doctest::Approx(0.0));

  WorkingModel two(vec({0, 0}), 1.0, Matrix::Zero(2, 2));
  two.add(plane(1, vec({1, 0}), PlaneTag::kExactness));
  two.add(plane(0, vec({0, 2})));
  Plane mix = aggregate_plane(two, {vec({0.25, 0.75}), Vector(0)});
  CHECK(mix.offset == doctest::Approx(0.25));
  CHECK(mix.gradient[0] == doctest::Approx(0.25));
  CHECK(mix.gradient[1] == doctest::Approx(1.5));

  CHECK_THROWS_AS(aggregate_plane(two, {vec({1, 0, 0}), Vector(0)}), StructuralError);
}

TEST_CASE("prune examples") {
  WorkingModel m(vec({0}), 0.0, Matrix::Zero(1, 1), 50);
  std::vector<std::uint64_t> ids;
  ids.push_back(m.add(plane(0, vec({1}), PlaneTag::kExactness)));
  ids.push_back(m.add(plane(-1, vec({2}))));
  ids.push_back(m.add(plane(-1, vec({3}))));
  m.prune(std::span<const std::uint64_t>(ids.data(), 1));
  CHECK(m.size() == 3);

  WorkingModel small(vec({0}), 0.0, Matrix::Zero(1, 1), 3);
  std::vector<std::uint64_t> all;
  for (int i = 0; i < 5; ++i) {
    all.push_back(small.add(plane(i == 0 ? 0.0 : -1.0, vec({double(i)}),
                                  i == 0 ? PlaneTag::kExactness : PlaneTag::kCutting)));
  }
  const std::vector<std::uint64_t> keep = {all[0], all[3], all[4]};
  small.prune(keep);
  REQUIRE(small.size() == 3);
  for (auto id : keep) CHECK(small.index_of(id) < small.size());
  CHECK(small.index_of(all[1]) == small.size());
  CHECK(small.index_of(all[2]) == small.size());

  // Oldest unprotected planes go first.
  WorkingModel order(vec({0}), 0.0, Matrix::Zero(1, 1), 3);
  std::vector<std::uint64_t> ord;
  for (int i = 0; i < 5; ++i) {
    ord.push_back(order.add(plane(i == 0 ? 0.0 : -1.0, vec({double(i)}),
                                  i == 0 ? PlaneTag::kExactness : PlaneTag::kCutting)));
  }
  const std::vector<std::uint64_t> only_first = {ord[0]};
  order.prune(only_first);
  CHECK(order.index_of(ord[1]) == order.size());
  CHECK(order.index_of(ord[2]) == order.size());
  CHECK(order.index_of(ord[3]) < order.size());
  CHECK(order.index_of(ord[4]) < order.size());

  // Idempotent.
  const auto before = order.planes().size();
  order.prune(only_first);
  CHECK(order.planes().size() == before);

  const std::vector<std::uint64_t> too_many = {ord[0], ord[3], ord[4]};
  WorkingModel tiny(vec({0}), 0.0, Matrix::Zero(1, 1), 2);
  std::vector<std::uint64_t> t;
  for (int i = 0; i < 3; ++i) {
    t.push_back(tiny.add(plane(i == 0 ? 0.0 : -1.0, vec({double(i)}),
                               i == 0 ? PlaneTag::kExactness : PlaneTag::kCutting)));
  }
  CHECK_THROWS_AS(tiny.prune(t), ConfigError);
}

TEST_CASE("first-order model is convex and exact at the serious point") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = testing::random_vector(rng, 3, -1, 1);
    const double fx = std::uniform_real_distribution<double>(-2, 2)(rng);
    WorkingModel m(x, fx, Matrix::Zero(3, 3));
    m.add(plane(fx, testing::random_vector(rng, 3, -2, 2), PlaneTag::kExactness));
    for (int i = 0; i < 6; ++i) {
      m.add(plane(fx - std::uniform_real_distribution<double>(0, 1)(rng),
                  testing::random_vector(rng, 3, -2, 2)));
    }
    CHECK(m.eval_first_order(x) == fx);
    for (int k = 0; k < 20; ++k) {
      const Vector y1 = testing::random_vector(rng, 3, -3, 3);
      const Vector y2 = testing::random_vector(rng, 3, -3, 3);
      const double th = std::uniform_real_distribution<double>(0, 1)(rng);
      const double lhs = m.eval_first_order(th * y1 + (1 - th) * y2);
      const double rhs = th * m.eval_first_order(y1) + (1 - th) * m.eval_first_order(y2);
      CHECK(lhs <= rhs + 1e-12 * (1 + std::abs(rhs)));
    }
  }
}
