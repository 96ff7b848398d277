#include "proxbundle/fem/mesh.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace proxbundle::fem {

const char* to_string(BoundaryPart part) {
  switch (part) {
    case BoundaryPart::kInterior: return "interior";
    case BoundaryPart::kTractionFree: return "traction_free";
    case BoundaryPart::kLoaded: return "loaded";
    case BoundaryPart::kContact: return "contact";
    case BoundaryPart::kClamped: return "clamped";
  }
  return "unknown";
}

double Mesh::part_length(BoundaryPart part) const {
  double total = 0.0;
  for (const BoundaryEdge& e : edges) {
    if (e.part == part) total += edge_length(e);
  }
  return total;
}

Mesh build_mesh(double length, double height, int nx, int ny, const BoundaryLayout& layout) {
  if (!(length > 0.0) || !(height > 0.0)) throw ConfigError("mesh sides must be positive");
  if (nx < 1 || ny < 1) throw ConfigError("mesh needs at least one square per direction");
  if (layout.clamp_fraction < 0.0 || layout.clamp_fraction > 1.0) {
    throw ConfigError("clamp fraction must lie in [0, 1]");
  }

  Mesh mesh;
  mesh.length = length;
  mesh.height = height;
  mesh.nx = nx;
  mesh.ny = ny;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes.emplace_back(length * i / nx, height * j / ny);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Index a = mesh.node(i, j), b = mesh.node(i + 1, j);
      const Index c = mesh.node(i + 1, j + 1), d = mesh.node(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }

  // Bottom edges right of this abscissa are clamped.
  const double clamp_start = length * (1.0 - layout.clamp_fraction);
  for (int i = 0; i < nx; ++i) {
    const double mid = length * (i + 0.5) / nx;
    const BoundaryPart part =
        mid > clamp_start ? BoundaryPart::kClamped : BoundaryPart::kContact;
    mesh.edges.push_back({mesh.node(i, 0), mesh.node(i + 1, 0), part});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.edges.push_back({mesh.node(nx, j), mesh.node(nx, j + 1),
                          layout.clamp_right_edge ? BoundaryPart::kClamped
                                                  : BoundaryPart::kTractionFree});
  }
  for (int i = nx; i > 0; --i) {
    mesh.edges.push_back({mesh.node(i, ny), mesh.node(i - 1, ny), BoundaryPart::kTractionFree});
  }
  for (int j = ny; j > 0; --j) {
    mesh.edges.push_back({mesh.node(0, j), mesh.node(0, j - 1), BoundaryPart::kLoaded});
  }

  mesh.tags.assign(mesh.nodes.size(), BoundaryPart::kInterior);
  for (const BoundaryEdge& e : mesh.edges) {
    for (Index n : {e.a, e.b}) mesh.tags[n] = std::max(mesh.tags[n], e.part);
  }
  if (std::none_of(mesh.edges.begin(), mesh.edges.end(),
                   [](const BoundaryEdge& e) { return e.part == BoundaryPart::kClamped; })) {
    throw ConfigError("boundary layout leaves the clamped part empty");
  }
  return mesh;
}

}  // namespace proxbundle::fem
