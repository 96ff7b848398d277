#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "proxbundle/types.hpp"

namespace proxbundle::fem {

/// Boundary part of an edge or node. Nodes take the part of highest priority
/// among their boundary edges: clamped > contact > loaded > traction-free.
enum class BoundaryPart : std::uint8_t { kInterior, kTractionFree, kLoaded, kContact, kClamped };

const char* to_string(BoundaryPart part);

/// Placement of the boundary parts on the rectangle (0, L) x (0, H).
/// The loaded part is the left edge, the bottom edge is split into contact
/// (left) and clamped (right) portions, the top edge is traction free.
struct BoundaryLayout {
  double clamp_fraction = 0.2;   // clamped share of the bottom edge, measured from the right
  bool clamp_right_edge = true;  // right edge clamped (otherwise traction free)
};

struct BoundaryEdge {
  Index a = 0;
  Index b = 0;
  BoundaryPart part = BoundaryPart::kTractionFree;
};

struct Mesh {
  double length = 0.0;
  double height = 0.0;
  int nx = 0;
  int ny = 0;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<Index, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryPart> tags;               // one per node
  std::vector<BoundaryEdge> edges;              // boundary edges

  Index node_count() const { return static_cast<Index>(nodes.size()); }
  /// Node at column i (0..nx) and row j (0..ny).
  Index node(int i, int j) const { return static_cast<Index>(j) * (nx + 1) + i; }
  double hx() const { return length / nx; }
  double hy() const { return height / ny; }
  double edge_length(const BoundaryEdge& e) const { return (nodes[e.b] - nodes[e.a]).norm(); }
  /// Total length of the edges carrying `part`.
  double part_length(BoundaryPart part) const;
};

/// Structured mesh of squares, each split by its rising diagonal.
/// Throws ConfigError for nonpositive sizes or a layout without clamped part.
Mesh build_mesh(double length, double height, int nx, int ny, const BoundaryLayout& layout = {});

}  // namespace proxbundle::fem
