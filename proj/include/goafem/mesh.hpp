#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "goafem/geometry.hpp"

namespace goafem {

enum class BoundaryLabel { Dirichlet, Neumann };

struct BoundaryEdge {
  std::array<int, 2> vertices;
  BoundaryLabel label;
};

/// Conforming 2D triangulation with the newest-vertex-bisection convention:
/// the refinement edge of a triangle (v0, v1, v2) is the edge opposite the
/// newest vertex v2. Local edge i is opposite local vertex i, so local edge 2
/// is always the refinement edge.
///
/// Immutable after construction; `refine` returns a new value whose vertex
/// list starts with the vertices of the input mesh.
class Triangulation {
public:
  static constexpr int no_parent = -1;
  static constexpr int no_element = -1;

  Triangulation(std::vector<Point> vertices,
                std::vector<std::array<int, 3>> triangles,
                std::vector<BoundaryEdge> boundary,
                std::vector<int> generation = {},
                std::vector<int> parent = {});

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary() const { return boundary_; }
  const std::vector<int>& generation() const { return generation_; }
  /// Element id in the mesh this one was refined from (itself if untouched).
  const std::vector<int>& parent() const { return parent_; }

  double area(int t) const { return areas_[t]; }
  Point centroid(int t) const;

  /// Edge topology: vertex pair sorted ascending.
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  /// Local edge i of element t (opposite local vertex i).
  int element_edge(int t, int i) const { return element_edges_[t][i]; }
  /// Elements adjacent to edge e; second entry is `no_element` on the boundary.
  const std::array<int, 2>& edge_elements(int e) const { return edge_elements_[e]; }
  /// Label of a boundary edge; nullopt for interior edges or unlabelled ones.
  std::optional<BoundaryLabel> edge_label(int e) const;
  bool is_boundary_edge(int e) const { return edge_elements_[e][1] == no_element; }

  /// Vertices touching a Dirichlet edge.
  std::vector<bool> dirichlet_vertices() const;
  /// Vertex -> adjacent vertices (sorted).
  std::vector<std::vector<int>> vertex_neighbors() const;

private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<int> generation_;
  std::vector<int> parent_;

  std::vector<double> areas_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> element_edges_;
  std::vector<std::array<int, 2>> edge_elements_;
  std::vector<int> edge_label_; // -1 none, else BoundaryLabel
  bool nonmanifold_ = false;

  friend bool is_conforming(const Triangulation&);
};

enum class Domain { UnitSquare, ZShape };

/// UnitSquare: two right triangles sharing the anti-diagonal as refinement
/// edge, all four sides Dirichlet. ZShape: (-1,1)^2 minus conv{(0,0),(-1,0),(-1,-1)}
/// on a 1/2-grid (28 triangles), Dirichlet on the two re-entrant edges,
/// Neumann elsewhere.
Triangulation initial_mesh(Domain domain);

/// Coarsest NVB refinement in which every marked element is bisected at
/// least once. Throws std::invalid_argument on an invalid element id.
Triangulation refine(const Triangulation& mesh, std::span<const int> marked);

Triangulation refine_uniform(const Triangulation& mesh, int times = 1);

/// Exact combinatorial check: no hanging nodes, every edge shared by at most
/// two triangles, single-triangle edges are exactly the listed boundary edges,
/// all areas positive.
bool is_conforming(const Triangulation& mesh);

/// Smallest interior angle over all triangles (radians).
double min_angle(const Triangulation& mesh);

/// Plain-text export: `vertices N`, N lines `x y`; `triangles M`, M lines
/// `a b c`; `boundary K`, K lines `a b D|N`.
void write_mesh(std::ostream& os, const Triangulation& mesh);
Triangulation read_mesh(std::istream& is);

/// Nested sequence T_0, ..., T_L with the vertices created on every level.
class MeshHierarchy {
public:
  explicit MeshHierarchy(std::shared_ptr<const Triangulation> coarse);

  /// Appends a refinement of the current finest mesh.
  void push(std::shared_ptr<const Triangulation> refined);

  std::size_t num_levels() const { return levels_.size(); }
  const Triangulation& level(std::size_t l) const { return *levels_[l]; }
  const std::shared_ptr<const Triangulation>& level_ptr(std::size_t l) const { return levels_[l]; }
  const Triangulation& finest() const { return *levels_.back(); }
  const std::shared_ptr<const Triangulation>& finest_ptr() const { return levels_.back(); }
  /// Vertices created when level l was refined from level l-1; all
  /// vertices for l = 0.
  const std::vector<int>& new_vertices(std::size_t l) const { return new_vertices_[l]; }

private:
  std::vector<std::shared_ptr<const Triangulation>> levels_;
  std::vector<std::vector<int>> new_vertices_;
};

std::string_view to_string(BoundaryLabel label);

} // namespace goafem
