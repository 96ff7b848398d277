#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "proxbundle/fem/delamination.hpp"
#include "support.hpp"

using namespace proxbundle;
using namespace proxbundle::fem;

namespace {

const std::filesystem::path kLaw = std::filesystem::path(PROXBUNDLE_DATA_DIR) / "adhesive_law.json";

Mesh benchmark_mesh(BoundaryLayout layout = {}) { return build_mesh(100, 10, 40, 4, layout); }

Vector rigid_field(const Mesh& mesh, int mode) {
  Vector r(2 * mesh.node_count());
  for (Index i = 0; i < mesh.node_count(); ++i) {
    const Eigen::Vector2d& p = mesh.nodes[i];
    if (mode == 0) r.segment<2>(2 * i) << 1, 0;
    if (mode == 1) r.segment<2>(2 * i) << 0, 1;
    if (mode == 2) r.segment<2>(2 * i) << -p.y(), p.x();
  }
  return r;
}

}  // namespace

TEST_CASE("mesh counts") {
  Mesh one = build_mesh(1, 1, 1, 1, {0.5, true});
  CHECK(one.node_count() == 4);
  CHECK(one.triangles.size() == 2);

  Mesh m = benchmark_mesh();
  CHECK(m.node_count() == 205);
  CHECK(m.triangles.size() == 320);
  CHECK(m.hx() == doctest::Approx(2.5));
  CHECK(m.hy() == doctest::Approx(2.5));
  CHECK(m.tags.size() == 205);
  CHECK(m.tags[m.node(0, 0)] == BoundaryPart::kContact);
  CHECK(m.tags[m.node(20, 2)] == BoundaryPart::kInterior);
  CHECK(m.tags[m.node(0, 2)] == BoundaryPart::kLoaded);
  CHECK(m.tags[m.node(40, 0)] == BoundaryPart::kClamped);
  CHECK(m.part_length(BoundaryPart::kContact) == doctest::Approx(80.0));
  CHECK(m.part_length(BoundaryPart::kLoaded) == doctest::Approx(10.0));
}

TEST_CASE("triangulation is conforming") {
  Mesh m = benchmark_mesh();
  std::map<std::pair<Index, Index>, int> uses;
  for (const auto& t : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      Index a = t[e], b = t[(e + 1) % 3];
      uses[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::size_t boundary = 0;
  for (const auto& [edge, n] : uses) {
    CHECK(n <= 2);
    if (n == 1) ++boundary;
  }
  CHECK(boundary == m.edges.size());
  CHECK(boundary == 2 * (40 + 4));
}

TEST_CASE("mesh errors") {
  CHECK_THROWS_AS(build_mesh(100, 10, 0, 4), ConfigError);
  CHECK_THROWS_AS(build_mesh(-1, 10, 4, 4), ConfigError);
  CHECK_THROWS_AS(build_mesh(100, 10, 40, 4, {0.0, false}), ConfigError);
}

TEST_CASE("stiffness symmetry and rigid modes") {
  const Mesh m = benchmark_mesh();
  const Matrix K = assemble_stiffness(m, {});
  CHECK(K == K.transpose());
  for (int mode = 0; mode < 3; ++mode) {
    const Vector r = rigid_field(m, mode);
    CHECK((K * r).norm() <= 1e-9 * K.norm() * r.norm());
  }
  const Matrix Kr = make_dof_map(m).restrict(K);
  CHECK(Kr.llt().info() == Eigen::Success);
}

TEST_CASE("single-element patch test") {
  ElasticityParams p{1000.0, 0.0, 2.0};
  const double a = 3.0, b = 2.0, eps = 1e-3;
  const Eigen::Vector2d p0(0, 0), p1(a, 0), p2(0, b);
  ElementVector u;
  u << 0, 0, eps * a, 0, 0, 0;
  const Eigen::Vector3d s = element_stress(p0, p1, p2, u, p);
  CHECK(std::abs(s[0] - p.young_modulus * eps) <= 1e-10);
  CHECK(std::abs(s[1]) <= 1e-10);
  CHECK(std::abs(s[2]) <= 1e-10);
  const double sigma = p.young_modulus * eps;
  ElementVector expected;
  expected << -sigma * b * p.thickness / 2, 0, sigma * b * p.thickness / 2, 0, 0, 0;
  CHECK((element_stiffness(p0, p1, p2, p) * u - expected).norm() <= 1e-10);
}

TEST_CASE("degenerate and clockwise triangles are rejected") {
  CHECK_THROWS_AS(strain_matrix({0, 0}, {1, 0}, {2, 0}), StructuralError);
  CHECK_THROWS_AS(strain_matrix({0, 0}, {0, 1}, {1, 0}), StructuralError);
}

TEST_CASE("elasticity parameters are validated") {
  CHECK_THROWS_AS((ElasticityParams{-1, 0.3, 5}.validate()), ConfigError);
  CHECK_THROWS_AS((ElasticityParams{1, 0.5, 5}.validate()), ConfigError);
  CHECK_THROWS_AS((ElasticityParams{1, 0.3, 0}.validate()), ConfigError);
}

TEST_CASE("load vector") {
  const Mesh m = benchmark_mesh();
  CHECK(assemble_load(m, 0.0, 5.0).norm() == 0.0);
  const Vector g = assemble_load(m, 0.6, 5.0);
  CHECK(g.sum() == doctest::Approx(0.6 * 10.0 * 5.0).epsilon(1e-14));
  for (Index i = 0; i < m.node_count(); ++i) CHECK(g[2 * i] == 0.0);

  Mesh one = build_mesh(2, 3, 1, 1, {0.5, true});
  const Vector g1 = assemble_load(one, 1.0, 4.0);
  CHECK(g1[2 * one.node(0, 0) + 1] == doctest::Approx(3.0 * 4.0 / 2));
  CHECK(g1[2 * one.node(0, 1) + 1] == doctest::Approx(3.0 * 4.0 / 2));
}

TEST_CASE("dof map and contact rows") {
  const DelaminationModel model(benchmark_mesh(), {}, AdhesiveLaw::zero(), 1.0);
  CHECK(model.dimension() == 384);
  CHECK(model.contact_nodes().size() == 32);
  CHECK(model.contact_constraints().rows() == 32);
  CHECK(model.contact_length() == doctest::Approx(80.0));
  double interior = 0, ends = 0;
  for (const ContactNode& c : model.contact_nodes()) {
    if (std::abs(c.weight - 2.5) < 1e-12) ++interior;
    if (std::abs(c.weight - 1.25) < 1e-12) ++ends;
  }
  CHECK(interior == 31);
  CHECK(ends == 1);
  CHECK(model.closure_weight() == doctest::Approx(1.25));

  const DelaminationModel whole(benchmark_mesh({0.0, true}), {}, AdhesiveLaw::zero(), 1.0);
  CHECK(whole.contact_constraints().rows() == 40);

  // Feasible points open every contact node.
  const Polyhedron con = model.contact_constraints();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = testing::random_vector(rng, model.dimension(), -1, 1);
    const bool feasible = con.contains(v, 0.0);
    bool open = true;
    for (const ContactNode& c : model.contact_nodes()) open = open && v[c.dof] >= 0.0;
    CHECK(feasible == open);
  }

  Mesh no_contact = build_mesh(100, 10, 40, 4, {1.0, true});
  const DelaminationModel bonded(no_contact, {}, AdhesiveLaw::zero(), 1.0);
  CHECK(bonded.contact_constraints().rows() == 0);
}

TEST_CASE("adhesive law") {
  const AdhesiveLaw law = AdhesiveLaw::load(kLaw);
  CHECK(law.pieces().size() == 5);
  CHECK(law.value(0.0) == 0.0);
  CHECK(AdhesiveLaw::zero().is_zero());
  CHECK_FALSE(law.is_zero());

  // 1/2 u^2 and 1 - u cross at sqrt(3) - 1.
  const AdhesiveLaw pair({{1, 0, 0}, {0, -1, 1}}, 5.0);
  const double u = std::sqrt(3.0) - 1.0;
  CHECK(pair.active(u).size() == 2);
  CHECK(pair.active(u - 1e-6) == std::vector<std::size_t>{0});
  CHECK(pair.active(u + 1e-6) == std::vector<std::size_t>{1});

  CHECK_THROWS_AS(AdhesiveLaw({{1, 0, 0}}, 5.0), ConfigError);
  CHECK_THROWS_AS(AdhesiveLaw({{-1, 0, 0}, {0, 1, 0}}, 5.0), ConfigError);
  // A quadratic piece that never attains the minimum.
  CHECK_THROWS_AS(AdhesiveLaw({{1, 0, 100}, {0, 0, 0}}, 5.0), ConfigError);
  CHECK_THROWS_AS(AdhesiveLaw::load("/nonexistent/law.json"), ConfigError);
}

TEST_CASE("energy with the zero law is linear elasticity") {
  const DelaminationModel model(benchmark_mesh(), {}, AdhesiveLaw::zero(), 0.4);
  const DelaminationEnergy energy(model);
  std::mt19937_64 rng(9);
  const Vector v = testing::random_vector(rng, model.dimension(), 0, 1e-3);
  const Matrix& K = model.stiffness();
  const Vector& g = model.load();
  CHECK(energy.value(v) == doctest::Approx(0.5 * v.dot(K * v) - g.dot(v)));
  CHECK((energy.subgradient(v) - (K * v - g)).norm() <= 1e-12 * (K * v).norm());
  CHECK((*energy.curvature(v) - K).norm() == 0.0);
  CHECK(energy.value(Vector::Zero(model.dimension())) == 0.0);
}

TEST_CASE("energy decomposition and finite differences at smooth points") {
  const DelaminationModel model(benchmark_mesh(), {}, AdhesiveLaw::load(kLaw), 1.0);
  const DelaminationEnergy energy(model);
  CHECK(energy.value(Vector::Zero(model.dimension())) == 0.0);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    // Openings either in the bonded branch or well past the bond limit.
    Vector v = testing::random_vector(rng, model.dimension(), -1e-3, 1e-3);
    for (const ContactNode& c : model.contact_nodes()) {
      v[c.dof] = trial % 2 == 0 ? std::abs(v[c.dof]) : 0.5 + std::abs(v[c.dof]);
    }
    CHECK(energy.value(v) == doctest::Approx(energy.elastic_energy(v) + energy.adhesive_energy(v) -
                                             energy.load_work(v)));
    const Vector d = testing::random_vector(rng, model.dimension(), -1, 1);
    const Vector g = energy.subgradient(v);
    for (double h : {1e-5, 1e-6}) {
      const double fd = (energy.value(v + h * d) - energy.value(v - h * d)) / (2 * h);
      CHECK(std::abs(fd - g.dot(d)) <= 1e-6 * (1.0 + std::abs(g.dot(d))));
    }
    const Vector ga = *energy.attaining_subgradient(v, d);
    CHECK((ga - g).norm() <= 1e-12 * (1.0 + g.norm()));
  }
}

TEST_CASE("attaining subgradient at a law kink") {
  const DelaminationModel model(benchmark_mesh(), {}, AdhesiveLaw({{1, 0, 0}, {0, -1, 1}}, 5.0),
                                0.0);
  const DelaminationEnergy energy(model);
  Vector v = Vector::Zero(model.dimension());
  const ContactNode& c = model.contact_nodes()[5];
  const double u = std::sqrt(3.0) - 1.0;
  v[c.dof] = u;
  Vector d = Vector::Zero(model.dimension());
  d[c.dof] = 1.0;
  const Vector elastic = model.stiffness() * v;
  // Opening direction: the quadratic slope u beats the linear slope -1.
  CHECK((*energy.attaining_subgradient(v, d))[c.dof] == doctest::Approx(elastic[c.dof] + c.weight * u));
  CHECK((*energy.attaining_subgradient(v, -d))[c.dof] == doctest::Approx(elastic[c.dof] - c.weight));
  CHECK(energy.subgradient(v)[c.dof] ==
        doctest::Approx(elastic[c.dof] + c.weight * 0.5 * (u - 1.0)));
}

TEST_CASE("reactions") {
  const DelaminationModel idle(benchmark_mesh(), {}, AdhesiveLaw::zero(), 0.0);
  for (const ReactionSample& r : recover_reaction(idle, Vector::Zero(idle.dimension()))) {
    CHECK(r.residual_traction == 0.0);
    CHECK(r.law_traction == 0.0);
  }

  // Uniform opening traction from a single linear piece j(u) = b u, b < 0.
  const double b = -0.3;
  const DelaminationModel model(benchmark_mesh(), {}, AdhesiveLaw({{0, b, 0}}, 5.0), 0.0);
  Vector rhs = model.load();
  for (const ContactNode& c : model.contact_nodes()) rhs[c.dof] -= c.weight * b;
  const Vector v = model.stiffness().llt().solve(rhs);
  const double t = model.params().thickness;
  for (const ReactionSample& r : recover_reaction(model, v)) {
    CHECK(r.opening > 0.0);
    CHECK_FALSE(r.constraint_active);
    CHECK(r.residual_traction == doctest::Approx(b / t).epsilon(1e-8));
    CHECK(r.law_traction == doctest::Approx(b / t));
  }
  CHECK(stationarity_residual(model, v, 1e-8) <= 1e-8 * (1.0 + model.load().norm() + rhs.norm()));
  CHECK(contact_violation(model, v) == 0.0);
  CHECK(contact_violation(model, -v) > 0.0);
}
