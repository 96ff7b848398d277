#pragma once

#include <filesystem>
#include <vector>

#include "proxbundle/types.hpp"

namespace proxbundle::fem {

/// j(u) = 1/2 k u^2 + b u + c.
struct LawPiece {
  double k = 0.0;
  double b = 0.0;
  double c = 0.0;

  double value(double u) const { return 0.5 * k * u * u + b * u + c; }
  double slope(double u) const { return k * u + b; }
};

/// Adhesive superpotential j(u) = min_i j_i(u) of the opening u >= 0, per unit
/// length of the contact boundary (N/mm). Pieces are convex quadratics plus
/// exactly one linear piece.
class AdhesiveLaw {
 public:
  static constexpr double kActiveTolerance = 1e-12;

  /// Validates the pieces and samples [0, working_range] to check that every
  /// piece is the minimum somewhere. Throws ConfigError otherwise.
  AdhesiveLaw(std::vector<LawPiece> pieces, double working_range);

  /// Every piece identically zero.
  static AdhesiveLaw zero();
  static AdhesiveLaw load(const std::filesystem::path& path);

  const std::vector<LawPiece>& pieces() const { return pieces_; }
  double working_range() const { return working_range_; }
  bool is_zero() const;

  double value(double u) const;
  /// Indices of the pieces attaining the minimum within kActiveTolerance.
  std::vector<std::size_t> active(double u) const;
  /// Active pieces allowing for a displacement error `delta`: piece i counts
  /// when j_i(u) - j(u) <= delta |j_i'(u) - j'(u)| (plus the value tolerance).
  std::vector<std::size_t> active_near(double u, double delta) const;

 private:
  std::vector<LawPiece> pieces_;
  double working_range_;
};

}  // namespace proxbundle::fem
