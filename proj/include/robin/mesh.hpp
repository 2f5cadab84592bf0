#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "robin/geometry.hpp"

namespace robin {

struct BoundaryFacet {
  std::array<int, 3> v{-1, -1, -1};  // d vertex indices
  int owner = -1;                    // the unique simplex containing the facet
  Vec3 inward_normal{0, 0, 0};       // unit, points into the domain
  double measure = 0.0;              // length in 2D, area in 3D
};

struct BoxInfo {
  Vec3 lower{0, 0, 0};
  Vec3 upper{0, 0, 0};
  std::array<int, 3> divisions{0, 0, 0};
};

// uniform bucket grid over the bounding box for O(1) point location
struct LocatorGrid {
  Vec3 origin{0, 0, 0};
  Vec3 cell{1, 1, 1};
  std::array<int, 3> dims{1, 1, 1};
  std::vector<int> offsets;  // CSR over flattened cells
  std::vector<int> items;    // candidate simplex indices
};

// Conforming simplicial mesh of a polytope in dimension 2 or 3.
// Immutable after construction; share freely across threads.
struct Mesh {
  int dim = 0;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> simplices;  // d+1 entries used, rest -1
  std::vector<BoundaryFacet> boundary_facets;
  std::vector<char> boundary_vertex;          // per-vertex flag
  std::optional<BoxInfo> box;                 // set for generated box meshes
  LocatorGrid locator;                        // built on construction

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_simplices() const { return static_cast<int>(simplices.size()); }
  double simplex_volume(int s) const;
  Vec3 simplex_centroid(int s) const;
  double total_volume() const;
  double total_surface() const;
  double max_diameter() const;

  // barycentric gradients of the d+1 hat functions on simplex s
  std::array<Vec3, 4> hat_gradients(int s) const;

  // point location (box meshes use the structured grid, otherwise linear scan);
  // returns simplex index and barycentric coordinates, or simplex -1 if outside
  struct Location {
    int simplex = -1;
    std::array<double, 4> bary{0, 0, 0, 0};
  };
  Location locate(const Vec3& x) const;
  double interpolate(const std::vector<double>& vertex_values, const Vec3& x) const;
};

Mesh build_box_mesh(int dim, const Vec3& lower, const Vec3& upper,
                    const std::array<int, 3>& divisions);
Mesh refine_uniform(const Mesh& mesh);

// ASCII format: `dim nv ns nf`, then nv vertex lines, ns simplex lines,
// nf boundary facet lines; `#` starts a comment.
Mesh load_mesh(const std::string& text);
std::string serialize_mesh(const Mesh& mesh);

// full invariant check; throws std::runtime_error naming the first offender
void validate_mesh(const Mesh& mesh);

}  // namespace robin
