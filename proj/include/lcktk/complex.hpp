#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lcktk {

using VertexId = int;

struct Edge {
  VertexId a = 0, b = 0;  // a < b
  auto operator<=>(const Edge&) const = default;
};

struct Triangle {
  VertexId a = 0, b = 0, c = 0;  // a < b < c
  auto operator<=>(const Triangle&) const = default;
};

class SimplicialComplex;
using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

/// Finite abstract simplicial 2-complex with dense vertex indices.
class SimplicialComplex {
 public:
  /// Validates the input and closes it under faces: edges of listed triangles
  /// are inserted when missing. Throws InvalidInput on out-of-range indices,
  /// degenerate simplices, or simplices listed twice.
  static ComplexPtr build(int vertex_count, const std::vector<std::array<VertexId, 2>>& edges,
                          const std::vector<std::array<VertexId, 3>>& triangles);

  int vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  int euler_characteristic() const {
    return vertex_count_ - static_cast<int>(edges_.size()) + static_cast<int>(triangles_.size());
  }

  /// Index of the edge {u, v}, if present.
  std::optional<int> edge_index(VertexId u, VertexId v) const;
  std::optional<int> triangle_index(VertexId u, VertexId v, VertexId w) const;
  bool has_edge(VertexId u, VertexId v) const { return edge_index(u, v).has_value(); }

  /// Neighbours of v in ascending order.
  const std::vector<VertexId>& neighbors(VertexId v) const { return neighbors_[v]; }
  /// Edge indices incident to v.
  const std::vector<int>& incident_edges(VertexId v) const { return incident_edges_[v]; }
  /// Triangle indices containing the edge.
  const std::vector<int>& edge_triangles(int edge) const { return edge_triangles_[edge]; }
  /// Triangle indices containing v.
  const std::vector<int>& vertex_triangles(VertexId v) const { return vertex_triangles_[v]; }
  /// The three edge indices of a triangle: ab, bc, ac.
  std::array<int, 3> triangle_edges(int t) const;

  bool is_connected() const;

  friend bool operator==(const SimplicialComplex& x, const SimplicialComplex& y) {
    return x.vertex_count_ == y.vertex_count_ && x.edges_ == y.edges_ && x.triangles_ == y.triangles_;
  }

 private:
  SimplicialComplex() = default;
  std::uint64_t key(VertexId u, VertexId v) const;

  int vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<Triangle> triangles_;
  std::unordered_map<std::uint64_t, int> edge_lookup_;
  std::vector<std::vector<VertexId>> neighbors_;
  std::vector<std::vector<int>> incident_edges_;
  std::vector<std::vector<int>> edge_triangles_;
  std::vector<std::vector<int>> vertex_triangles_;
};

bool same_complex(const ComplexPtr& x, const ComplexPtr& y);

/// Face-closed subset of the simplices of a parent complex.
///
/// Charts such as closed vertex stars are not induced in general, so the
/// simplices are stored explicitly; `induced` builds the induced case.
class Subcomplex {
 public:
  Subcomplex() = default;

  /// All simplices of the parent spanned by the given vertices.
  static Subcomplex induced(ComplexPtr parent, std::vector<VertexId> vertices);
  /// Closure under faces of the listed simplices (edge/triangle indices into the parent).
  static Subcomplex from_simplices(ComplexPtr parent, std::vector<VertexId> vertices,
                                   std::vector<int> edges, std::vector<int> triangles = {});
  /// Closed star of v: every simplex containing v, with all faces.
  static Subcomplex closed_star(ComplexPtr parent, VertexId v);
  static Subcomplex whole(ComplexPtr parent);

  const ComplexPtr& parent() const { return parent_; }
  const std::vector<VertexId>& vertices() const { return vertices_; }
  const std::vector<int>& edges() const { return edges_; }
  const std::vector<int>& triangles() const { return triangles_; }
  bool empty() const { return vertices_.empty(); }

  bool contains_vertex(VertexId v) const;
  bool contains_edge(int edge) const;
  bool contains_triangle(int tri) const;
  /// Position of v in vertices(), if present.
  std::optional<std::size_t> vertex_position(VertexId v) const;

  Subcomplex intersect(const Subcomplex& other) const;

  friend bool operator==(const Subcomplex& x, const Subcomplex& y) {
    return x.vertices_ == y.vertices_ && x.edges_ == y.edges_ && x.triangles_ == y.triangles_;
  }

 private:
  ComplexPtr parent_;
  std::vector<VertexId> vertices_;
  std::vector<int> edges_;
  std::vector<int> triangles_;
};

/// Maximal edge-connected pieces, ordered by smallest vertex.
std::vector<Subcomplex> connected_components(const Subcomplex& sub);

/// A family of charts whose union contains every simplex of the parent.
class Cover {
 public:
  Cover() = default;
  /// Throws InvalidInput when a chart is empty, belongs to another complex,
  /// or some simplex of the parent lies in no chart.
  Cover(ComplexPtr parent, std::vector<Subcomplex> charts);

  static Cover single_chart(ComplexPtr parent);

  const ComplexPtr& parent() const { return parent_; }
  const std::vector<Subcomplex>& charts() const { return charts_; }
  std::size_t size() const { return charts_.size(); }
  const Subcomplex& operator[](std::size_t i) const { return charts_[i]; }

  /// Charts containing the vertex / edge, ascending.
  const std::vector<int>& charts_of_vertex(VertexId v) const { return vertex_charts_[v]; }
  const std::vector<int>& charts_of_edge(int edge) const { return edge_charts_[edge]; }

  /// Chart pairs (a < b) sharing at least one vertex, ascending.
  std::vector<std::pair<int, int>> overlapping_pairs() const;

 private:
  ComplexPtr parent_;
  std::vector<Subcomplex> charts_;
  std::vector<std::vector<int>> vertex_charts_;
  std::vector<std::vector<int>> edge_charts_;
};

/// One chart per vertex: its closed star.
Cover star_cover(const ComplexPtr& complex);

/// Vertex sequence with consecutive vertices adjacent.
struct EdgePath {
  std::vector<VertexId> vertices;

  VertexId start() const { return vertices.front(); }
  VertexId end() const { return vertices.back(); }
  std::size_t edge_count() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  bool is_loop() const { return !vertices.empty() && start() == end(); }
  EdgePath reversed() const;
  /// this followed by other; other must start where this ends.
  EdgePath then(const EdgePath& other) const;

  friend bool operator==(const EdgePath&, const EdgePath&) = default;
  friend auto operator<=>(const EdgePath&, const EdgePath&) = default;
};

/// Throws InvalidInput if the path is empty, leaves the complex, or steps along a non-edge.
void validate_path(const SimplicialComplex& complex, const EdgePath& path);

std::string to_string(const EdgePath& path);

/// Every path reachable by one elementary move, endpoints fixed:
/// insert or delete a backtrack v,w,v; replace two sides of a triangle by the
/// third or one side by the other two. Sorted and deduplicated.
std::vector<EdgePath> elementary_homotopy_moves(const EdgePath& path, const SimplicialComplex& complex);

}  // namespace lcktk
