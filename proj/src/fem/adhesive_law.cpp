#include "proxbundle/fem/adhesive_law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

namespace proxbundle::fem {

namespace {
constexpr int kSamples = 20001;
}

AdhesiveLaw::AdhesiveLaw(std::vector<LawPiece> pieces, double working_range)
    : pieces_(std::move(pieces)), working_range_(working_range) {
  if (pieces_.empty()) throw ConfigError("adhesive law needs at least one piece");
  if (!(working_range_ > 0.0)) throw ConfigError("adhesive law working range must be positive");
  int linear = 0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const LawPiece& p = pieces_[i];
    if (!std::isfinite(p.k) || !std::isfinite(p.b) || !std::isfinite(p.c)) {
      throw ConfigError(fmt::format("adhesive law piece {} has a non-finite coefficient", i));
    }
    if (p.k < 0.0) throw ConfigError(fmt::format("adhesive law piece {} is not convex", i));
    if (p.k == 0.0) ++linear;
  }
  if (linear != 1) {
    throw ConfigError(fmt::format("adhesive law needs exactly one linear piece, got {}", linear));
  }
  if (pieces_.size() == 1) return;

  // Every piece must be the minimum somewhere on the working range, so the
  // crossings between consecutive pieces lie inside it.
  std::vector<bool> seen(pieces_.size(), false);
  for (int s = 0; s < kSamples; ++s) {
    const double u = working_range_ * s / (kSamples - 1);
    for (std::size_t i : active(u)) seen[i] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw ConfigError(fmt::format(
          "adhesive law piece {} is never the minimum on [0, {}]", i, working_range_));
    }
  }
}

AdhesiveLaw AdhesiveLaw::zero() { return AdhesiveLaw({LawPiece{}}, 1.0); }

AdhesiveLaw AdhesiveLaw::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open adhesive law file '{}'", path.string()));
  try {
    nlohmann::json doc;
    in >> doc;
    std::vector<LawPiece> pieces;
    for (const auto& p : doc.at("pieces")) {
      pieces.push_back({p.at("k").get<double>(), p.at("b").get<double>(), p.at("c").get<double>()});
    }
    return AdhesiveLaw(std::move(pieces), doc.at("working_range").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("adhesive law file '{}': {}", path.string(), e.what()));
  }
}

bool AdhesiveLaw::is_zero() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const LawPiece& p) { return p.k == 0.0 && p.b == 0.0 && p.c == 0.0; });
}

double AdhesiveLaw::value(double u) const {
  double v = std::numeric_limits<double>::infinity();
  for (const LawPiece& p : pieces_) v = std::min(v, p.value(u));
  return v;
}

std::vector<std::size_t> AdhesiveLaw::active(double u) const { return active_near(u, 0.0); }

std::vector<std::size_t> AdhesiveLaw::active_near(double u, double delta) const {
  const double v = value(u);
  double slope = 0.0;
  for (const LawPiece& p : pieces_) {
    if (p.value(u) == v) {
      slope = p.slope(u);
      break;
    }
  }
  const double tol = kActiveTolerance * (1.0 + std::abs(v));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double gap = pieces_[i].value(u) - v;
    if (gap <= tol + delta * std::abs(pieces_[i].slope(u) - slope)) out.push_back(i);
  }
  return out;
}

}  // namespace proxbundle::fem
