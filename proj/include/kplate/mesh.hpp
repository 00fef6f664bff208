#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace kplate {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Boundary condition attached to a boundary edge.
enum class BoundaryKind {
  Clamped,          // u = 0, d_n u = 0
  SimplySupported,  // u = 0, sigma_nn = 0
  Free              // sigma_nn = 0, K_n = 0
};

char boundary_kind_letter(BoundaryKind kind);
BoundaryKind boundary_kind_from_letter(char c);

/// Assigns boundary kinds to straight boundary segments lying on coordinate
/// lines. Edges not covered by a rule receive the default kind.
struct BoundarySpec {
  struct Rule {
    int axis;      // 0: line x = value, 1: line y = value
    double value;
    BoundaryKind kind;
  };
  BoundaryKind default_kind = BoundaryKind::Clamped;
  std::vector<Rule> rules;

  BoundaryKind classify(const Vec2& a, const Vec2& b) const;
  bool all_clamped() const;
};

/// Oriented edge. v[0] = V1(E), v[1] = V2(E); t[0] = T1(E) is the triangle on
/// the left of V1 -> V2, t[1] = T2(E) or -1 on the boundary.
struct Edge {
  std::array<int, 2> v{};
  std::array<int, 2> t{-1, -1};
  bool boundary() const { return t[1] < 0; }
};

/// Conforming triangulation. Triangles are stored counterclockwise with the
/// refinement edge opposite the first vertex. Local edge i of a triangle is the
/// edge opposite its local vertex i.
class Mesh {
 public:
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       const std::map<std::pair<int, int>, BoundaryKind>& boundary_tags = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  const Vec2& vertex(int i) const { return vertices_[i]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
  /// Boundary kind of a boundary edge; throws for interior edges.
  BoundaryKind boundary_kind(int e) const;
  /// Sorted vertex pair -> edge id.
  int find_edge(int a, int b) const;

  /// Unit normal of the edge, outward from T1(E).
  Vec2 edge_normal(int e) const;
  /// Unit tangent, the normal rotated by +pi/2; points from V1 to V2.
  Vec2 edge_tangent(int e) const;
  double edge_length(int e) const;
  Vec2 edge_point(int e, double s) const;
  double area(int t) const;
  double diameter(int t) const;
  Vec2 centroid(int t) const;
  double max_diameter() const;

  /// Vertex on a boundary edge with the given kind.
  bool vertex_touches(int v, BoundaryKind kind) const;
  const std::vector<int>& vertex_edges(int v) const { return vertex_edges_[v]; }

  /// Copy with the orientation of one interior edge reversed (V1 <-> V2,
  /// T1 <-> T2). Used to check orientation invariance.
  Mesh with_reversed_edge(int e) const;

  std::map<std::pair<int, int>, BoundaryKind> boundary_tags() const;
  int num_boundary_edges() const;

 private:
  void build();

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<BoundaryKind> kinds_;  // per edge, meaningful on boundary
  std::vector<std::vector<int>> vertex_edges_;
  std::map<std::pair<int, int>, int> edge_index_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

Mesh make_square_mesh(int n, const BoundarySpec& spec = {});
Mesh make_lshape_mesh(int n, const BoundarySpec& spec = {});

struct RefinementResult {
  Mesh mesh;
  std::vector<int> parent;                 // child element -> parent element
  std::vector<std::vector<int>> children;  // parent element -> children
};

/// Newest-vertex bisection of the marked elements plus closure.
RefinementResult refine(const Mesh& mesh, std::span<const int> marked);
RefinementResult refine_uniform(const Mesh& mesh);

/// Text format with VERTICES / TRIANGLES / BOUNDARY sections.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
Mesh read_mesh_file(const std::string& path);

}  // namespace kplate
