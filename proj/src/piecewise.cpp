#include "proxbundle/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

namespace proxbundle {

double QuadraticBranch::value(const Vector& x) const {
  return 0.5 * x.dot(hessian * x) + linear.dot(x) + constant;
}

Vector QuadraticBranch::gradient(const Vector& x) const { return hessian * x + linear; }

PiecewiseQuadratic::PiecewiseQuadratic(std::vector<QuadraticBranch> branches, Combiner combiner)
    : branches_(std::move(branches)), combiner_(combiner) {
  if (branches_.empty()) throw StructuralError("piecewise function needs at least one branch");
  dimension_ = branches_.front().linear.size();
  for (const QuadraticBranch& b : branches_) {
    if (b.linear.size() != dimension_ || b.hessian.rows() != dimension_ ||
        b.hessian.cols() != dimension_) {
      throw StructuralError("branch dimensions disagree");
    }
    if ((b.hessian - b.hessian.transpose()).cwiseAbs().maxCoeff() > 0.0) {
      throw StructuralError("branch Hessian is not symmetric");
    }
  }
}

PiecewiseEval PiecewiseQuadratic::eval(const Vector& x) const {
  if (x.size() != dimension_) throw StructuralError("point has wrong dimension");
  std::vector<double> values(branches_.size());
  for (std::size_t i = 0; i < branches_.size(); ++i) values[i] = branches_[i].value(x);
  PiecewiseEval out;
  out.value = combiner_ == Combiner::kMax ? *std::max_element(values.begin(), values.end())
                                          : *std::min_element(values.begin(), values.end());
  const double tol = kActiveTolerance * (1.0 + std::abs(out.value));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - out.value) <= tol) out.active.push_back(i);
  }
  return out;
}

Vector PiecewiseQuadratic::subgradient(const Vector& x) const {
  const PiecewiseEval e = eval(x);
  Vector g = Vector::Zero(dimension_);
  for (std::size_t i : e.active) g += branches_[i].gradient(x);
  return g / static_cast<double>(e.active.size());
}

std::optional<Vector> PiecewiseQuadratic::attaining_subgradient(const Vector& x,
                                                                const Vector& d) const {
  const PiecewiseEval e = eval(x);
  Vector best;
  double best_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i : e.active) {
    Vector g = branches_[i].gradient(x);
    const double slope = g.dot(d);
    if (slope > best_slope) {
      best_slope = slope;
      best = std::move(g);
    }
  }
  return best;
}

std::optional<Matrix> PiecewiseQuadratic::curvature(const Vector& x) const {
  const PiecewiseEval e = eval(x);
  Matrix H = Matrix::Zero(dimension_, dimension_);
  for (std::size_t i : e.active) H += branches_[i].hessian;
  return H / static_cast<double>(e.active.size());
}

double PiecewiseQuadratic::lipschitz_bound(const Vector& lower, const Vector& upper) const {
  // |H x + p| <= |H| |x| + |p|, with |x| bounded by the farthest corner.
  const double radius = lower.cwiseAbs().cwiseMax(upper.cwiseAbs()).norm();
  double L = 0.0;
  for (const QuadraticBranch& b : branches_) {
    const double h_norm = b.hessian.size() == 0 ? 0.0 : b.hessian.operatorNorm();
    L = std::max(L, h_norm * radius + b.linear.norm());
  }
  return L;
}

GridOracleResult grid_oracle(const Problem& problem, const Vector& lower, const Vector& upper,
                             double resolution) {
  const Index n = problem.dimension();
  if (n > 3) throw ConfigError(fmt::format("grid oracle refuses dimension {} > 3", n));
  if (!(resolution > 0.0)) throw ConfigError("grid resolution must be positive");
  if (lower.size() != n || upper.size() != n) throw StructuralError("box has wrong dimension");
  std::vector<long> counts(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (!(upper[i] >= lower[i])) throw ConfigError("box is empty");
    counts[static_cast<std::size_t>(i)] =
        static_cast<long>(std::floor((upper[i] - lower[i]) / resolution + 1e-9)) + 1;
  }

  GridOracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<long> idx(static_cast<std::size_t>(n), 0);
  Vector x(n);
  while (true) {
    for (Index i = 0; i < n; ++i) {
      x[i] = lower[i] + static_cast<double>(idx[static_cast<std::size_t>(i)]) * resolution;
    }
    const double v = problem.value(x);
    ++best.evaluated;
    if (v < best.value) {
      best.value = v;
      best.point = x;
    }
    Index k = 0;
    for (; k < n; ++k) {
      auto& i = idx[static_cast<std::size_t>(k)];
      if (++i < counts[static_cast<std::size_t>(k)]) break;
      i = 0;
    }
    if (k == n) break;
  }
  return best;
}

namespace {

using nlohmann::json;

Vector to_vector(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

Matrix to_matrix(const json& j, Index n) {
  Matrix m(n, n);
  if (static_cast<Index>(j.size()) != n) throw ConfigError("matrix has wrong row count");
  for (Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Index>(row.size()) != n) throw ConfigError("matrix has wrong column count");
    for (Index c = 0; c < n; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

QuadraticBranch to_branch(const json& j, Index n) {
  QuadraticBranch b;
  b.hessian = to_matrix(j.at("hessian"), n);
  b.linear = to_vector(j.at("linear"));
  b.constant = j.value("constant", 0.0);
  return b;
}

// Smooth quadratic plus sum_i w_i min_k j_k(x_i): expanded into one branch per
// selection of a law piece for every coordinate.
std::vector<QuadraticBranch> expand_separable(const json& j, Index n) {
  const QuadraticBranch smooth = to_branch(j.at("smooth"), n);
  const Vector weights = to_vector(j.at("weights"));
  if (weights.size() != n) throw ConfigError("separable weights have wrong length");
  const json& pieces = j.at("pieces");
  const std::size_t m = pieces.size();
  if (m == 0) throw ConfigError("separable instance without pieces");

  std::vector<QuadraticBranch> out;
  std::vector<std::size_t> sel(static_cast<std::size_t>(n), 0);
  while (true) {
    QuadraticBranch b = smooth;
    for (Index i = 0; i < n; ++i) {
      const json& piece = pieces[sel[static_cast<std::size_t>(i)]];
      b.hessian(i, i) += weights[i] * piece.at("k").get<double>();
      b.linear[i] += weights[i] * piece.at("b").get<double>();
      b.constant += weights[i] * piece.at("c").get<double>();
    }
    out.push_back(std::move(b));
    Index k = 0;
    for (; k < n; ++k) {
      if (++sel[static_cast<std::size_t>(k)] < m) break;
      sel[static_cast<std::size_t>(k)] = 0;
    }
    if (k == n) break;
  }
  return out;
}

}  // namespace

std::vector<CorpusInstance> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open corpus file '{}'", path.string()));
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("corpus file '{}': {}", path.string(), e.what()));
  }

  std::vector<CorpusInstance> out;
  try {
    for (const json& j : doc.at("instances")) {
      const auto n = j.at("dimension").get<Index>();
      const std::string comb = j.at("combiner").get<std::string>();
      if (comb != "max" && comb != "min") throw ConfigError("combiner must be max or min");
      std::vector<QuadraticBranch> branches;
      if (j.value("structure", std::string("branches")) == "separable") {
        branches = expand_separable(j, n);
      } else {
        for (const json& b : j.at("branches")) branches.push_back(to_branch(b, n));
      }
      CorpusInstance inst{
          j.at("id").get<std::string>(),
          j.at("smoothness").get<std::string>(),
          j.value("description", std::string()),
          PiecewiseQuadratic(std::move(branches), comb == "max" ? Combiner::kMax : Combiner::kMin),
          to_vector(j.at("box").at("lower")),
          to_vector(j.at("box").at("upper")),
          to_vector(j.at("start")),
          {},
          0.0,
          0.0,
          0.0};
      if (inst.lower.size() != n || inst.upper.size() != n || inst.start.size() != n) {
        throw ConfigError(fmt::format("instance {}: box or start has wrong dimension", inst.id));
      }
      if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        inst.oracle_point = to_vector(o.at("x"));
        inst.oracle_value = o.at("f").get<double>();
        inst.oracle_resolution = o.at("resolution").get<double>();
        inst.oracle_lipschitz = o.at("lipschitz").get<double>();
      }
      out.push_back(std::move(inst));
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("corpus file '{}': {}", path.string(), e.what()));
  }
  return out;
}

const CorpusInstance& find_instance(const std::vector<CorpusInstance>& corpus,
                                    const std::string& id) {
  for (const CorpusInstance& c : corpus) {
    if (c.id == id) return c;
  }
  throw ConfigError(fmt::format("unknown corpus instance '{}'", id));
}

}  // namespace proxbundle
