#include "lcktk/complex.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

#include "lcktk/errors.hpp"

namespace lcktk {

namespace {

template <class T>
bool sorted_contains(const std::vector<T>& v, const T& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

template <class T>
std::vector<T> sorted_intersection(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string simplex_name(std::initializer_list<VertexId> vs) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (auto v : vs) {
    os << (first ? "" : ",") << v;
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace

std::uint64_t SimplicialComplex::key(VertexId u, VertexId v) const {
  if (u > v) std::swap(u, v);
  return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(vertex_count_) + static_cast<std::uint64_t>(v);
}

ComplexPtr SimplicialComplex::build(int vertex_count, const std::vector<std::array<VertexId, 2>>& edges,
                                    const std::vector<std::array<VertexId, 3>>& triangles) {
  if (vertex_count < 0) throw InvalidInput("negative vertex count");
  auto in_range = [&](VertexId v) { return v >= 0 && v < vertex_count; };

  std::set<Edge> edge_set;
  for (const auto& e : edges) {
    if (!in_range(e[0]) || !in_range(e[1]))
      throw InvalidInput("edge " + simplex_name({e[0], e[1]}) + " has a vertex index out of range [0, " +
                         std::to_string(vertex_count) + ")");
    if (e[0] == e[1]) throw InvalidInput("degenerate edge " + simplex_name({e[0], e[1]}));
    Edge ed{std::min(e[0], e[1]), std::max(e[0], e[1])};
    if (!edge_set.insert(ed).second) throw InvalidInput("duplicate edge " + simplex_name({ed.a, ed.b}));
  }
  std::set<Triangle> tri_set;
  for (const auto& t : triangles) {
    for (auto v : t)
      if (!in_range(v))
        throw InvalidInput("triangle " + simplex_name({t[0], t[1], t[2]}) + " has a vertex index out of range");
    std::array<VertexId, 3> s = t;
    std::sort(s.begin(), s.end());
    if (s[0] == s[1] || s[1] == s[2]) throw InvalidInput("degenerate triangle " + simplex_name({t[0], t[1], t[2]}));
    if (!tri_set.insert(Triangle{s[0], s[1], s[2]}).second)
      throw InvalidInput("duplicate triangle " + simplex_name({s[0], s[1], s[2]}));
    edge_set.insert(Edge{s[0], s[1]});
    edge_set.insert(Edge{s[1], s[2]});
    edge_set.insert(Edge{s[0], s[2]});
  }

  std::shared_ptr<SimplicialComplex> c(new SimplicialComplex());
  c->vertex_count_ = vertex_count;
  c->edges_.assign(edge_set.begin(), edge_set.end());
  c->triangles_.assign(tri_set.begin(), tri_set.end());
  c->neighbors_.resize(vertex_count);
  c->incident_edges_.resize(vertex_count);
  c->vertex_triangles_.resize(vertex_count);
  c->edge_triangles_.resize(c->edges_.size());
  for (int i = 0; i < static_cast<int>(c->edges_.size()); ++i) {
    const auto& e = c->edges_[i];
    c->edge_lookup_.emplace(c->key(e.a, e.b), i);
    c->neighbors_[e.a].push_back(e.b);
    c->neighbors_[e.b].push_back(e.a);
    c->incident_edges_[e.a].push_back(i);
    c->incident_edges_[e.b].push_back(i);
  }
  for (auto& n : c->neighbors_) std::sort(n.begin(), n.end());
  for (int t = 0; t < static_cast<int>(c->triangles_.size()); ++t) {
    for (int e : c->triangle_edges(t)) c->edge_triangles_[e].push_back(t);
    const auto& tr = c->triangles_[t];
    for (auto v : {tr.a, tr.b, tr.c}) c->vertex_triangles_[v].push_back(t);
  }
  return c;
}

std::optional<int> SimplicialComplex::edge_index(VertexId u, VertexId v) const {
  if (u == v || u < 0 || v < 0 || u >= vertex_count_ || v >= vertex_count_) return std::nullopt;
  auto it = edge_lookup_.find(key(u, v));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> SimplicialComplex::triangle_index(VertexId u, VertexId v, VertexId w) const {
  std::array<VertexId, 3> s{u, v, w};
  std::sort(s.begin(), s.end());
  Triangle t{s[0], s[1], s[2]};
  auto it = std::lower_bound(triangles_.begin(), triangles_.end(), t);
  if (it == triangles_.end() || *it != t) return std::nullopt;
  return static_cast<int>(it - triangles_.begin());
}

std::array<int, 3> SimplicialComplex::triangle_edges(int t) const {
  const auto& tr = triangles_[t];
  return {*edge_index(tr.a, tr.b), *edge_index(tr.b, tr.c), *edge_index(tr.a, tr.c)};
}

bool SimplicialComplex::is_connected() const {
  if (vertex_count_ == 0) return true;
  std::vector<char> seen(vertex_count_, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : neighbors_[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == vertex_count_;
}

bool same_complex(const ComplexPtr& x, const ComplexPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  return *x == *y;
}

// ---------------------------------------------------------------------------

Subcomplex Subcomplex::induced(ComplexPtr parent, std::vector<VertexId> vertices) {
  sort_unique(vertices);
  for (auto v : vertices)
    if (v < 0 || v >= parent->vertex_count()) throw InvalidInput("subcomplex vertex " + std::to_string(v) + " out of range");
  Subcomplex s;
  s.parent_ = std::move(parent);
  s.vertices_ = std::move(vertices);
  std::vector<char> in(s.parent_->vertex_count(), 0);
  for (auto v : s.vertices_) in[v] = 1;
  for (auto v : s.vertices_)
    for (int e : s.parent_->incident_edges(v)) {
      const auto& ed = s.parent_->edges()[e];
      if (ed.a == v && in[ed.b]) s.edges_.push_back(e);
    }
  for (auto v : s.vertices_)
    for (int t : s.parent_->vertex_triangles(v)) {
      const auto& tr = s.parent_->triangles()[t];
      if (tr.a == v && in[tr.b] && in[tr.c]) s.triangles_.push_back(t);
    }
  sort_unique(s.edges_);
  sort_unique(s.triangles_);
  return s;
}

Subcomplex Subcomplex::from_simplices(ComplexPtr parent, std::vector<VertexId> vertices, std::vector<int> edges,
                                      std::vector<int> triangles) {
  Subcomplex s;
  s.parent_ = std::move(parent);
  const auto& P = *s.parent_;
  for (int t : triangles) {
    if (t < 0 || t >= static_cast<int>(P.triangles().size())) throw InvalidInput("triangle index out of range");
    for (int e : P.triangle_edges(t)) edges.push_back(e);
  }
  for (int e : edges) {
    if (e < 0 || e >= static_cast<int>(P.edges().size())) throw InvalidInput("edge index out of range");
    vertices.push_back(P.edges()[e].a);
    vertices.push_back(P.edges()[e].b);
  }
  for (auto v : vertices)
    if (v < 0 || v >= P.vertex_count()) throw InvalidInput("subcomplex vertex " + std::to_string(v) + " out of range");
  sort_unique(vertices);
  sort_unique(edges);
  sort_unique(triangles);
  s.vertices_ = std::move(vertices);
  s.edges_ = std::move(edges);
  s.triangles_ = std::move(triangles);
  return s;
}

Subcomplex Subcomplex::closed_star(ComplexPtr parent, VertexId v) {
  if (v < 0 || v >= parent->vertex_count()) throw InvalidInput("star center out of range");
  std::vector<int> edges = parent->incident_edges(v);
  std::vector<int> tris = parent->vertex_triangles(v);
  return from_simplices(std::move(parent), {v}, std::move(edges), std::move(tris));
}

Subcomplex Subcomplex::whole(ComplexPtr parent) {
  Subcomplex s;
  s.vertices_.resize(parent->vertex_count());
  for (int i = 0; i < parent->vertex_count(); ++i) s.vertices_[i] = i;
  s.edges_.resize(parent->edges().size());
  for (std::size_t i = 0; i < s.edges_.size(); ++i) s.edges_[i] = static_cast<int>(i);
  s.triangles_.resize(parent->triangles().size());
  for (std::size_t i = 0; i < s.triangles_.size(); ++i) s.triangles_[i] = static_cast<int>(i);
  s.parent_ = std::move(parent);
  return s;
}

bool Subcomplex::contains_vertex(VertexId v) const { return sorted_contains(vertices_, v); }
bool Subcomplex::contains_edge(int edge) const { return sorted_contains(edges_, edge); }
bool Subcomplex::contains_triangle(int tri) const { return sorted_contains(triangles_, tri); }

std::optional<std::size_t> Subcomplex::vertex_position(VertexId v) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

Subcomplex Subcomplex::intersect(const Subcomplex& other) const {
  Subcomplex s;
  s.parent_ = parent_;
  s.vertices_ = sorted_intersection(vertices_, other.vertices_);
  s.edges_ = sorted_intersection(edges_, other.edges_);
  s.triangles_ = sorted_intersection(triangles_, other.triangles_);
  return s;
}

std::vector<Subcomplex> connected_components(const Subcomplex& sub) {
  std::vector<Subcomplex> out;
  if (sub.empty()) return out;
  const auto& P = *sub.parent();
  const auto& vs = sub.vertices();
  std::vector<int> comp(vs.size(), -1);
  int ncomp = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (comp[i] >= 0) continue;
    comp[i] = ncomp;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      auto j = stack.back();
      stack.pop_back();
      for (int e : P.incident_edges(vs[j])) {
        if (!sub.contains_edge(e)) continue;
        const auto& ed = P.edges()[e];
        VertexId w = ed.a == vs[j] ? ed.b : ed.a;
        auto k = *sub.vertex_position(w);
        if (comp[k] < 0) {
          comp[k] = ncomp;
          stack.push_back(k);
        }
      }
    }
    ++ncomp;
  }
  std::vector<std::vector<VertexId>> cv(ncomp);
  std::vector<std::vector<int>> ce(ncomp), ct(ncomp);
  for (std::size_t i = 0; i < vs.size(); ++i) cv[comp[i]].push_back(vs[i]);
  for (int e : sub.edges()) ce[comp[*sub.vertex_position(P.edges()[e].a)]].push_back(e);
  for (int t : sub.triangles()) ct[comp[*sub.vertex_position(P.triangles()[t].a)]].push_back(t);
  out.reserve(ncomp);
  for (int c = 0; c < ncomp; ++c)
    out.push_back(Subcomplex::from_simplices(sub.parent(), std::move(cv[c]), std::move(ce[c]), std::move(ct[c])));
  return out;
}

// ---------------------------------------------------------------------------

Cover::Cover(ComplexPtr parent, std::vector<Subcomplex> charts) : parent_(std::move(parent)), charts_(std::move(charts)) {
  const auto& P = *parent_;
  vertex_charts_.assign(P.vertex_count(), {});
  edge_charts_.assign(P.edges().size(), {});
  std::vector<char> tri_covered(P.triangles().size(), 0);
  for (int a = 0; a < static_cast<int>(charts_.size()); ++a) {
    const auto& ch = charts_[a];
    if (ch.empty()) throw InvalidInput("chart " + std::to_string(a) + " is empty");
    if (!same_complex(ch.parent(), parent_)) throw InvalidInput("chart " + std::to_string(a) + " lives on another complex");
    for (auto v : ch.vertices()) vertex_charts_[v].push_back(a);
    for (int e : ch.edges()) edge_charts_[e].push_back(a);
    for (int t : ch.triangles()) tri_covered[t] = 1;
  }
  for (int v = 0; v < P.vertex_count(); ++v)
    if (vertex_charts_[v].empty()) throw InvalidInput("vertex " + std::to_string(v) + " lies in no chart");
  for (std::size_t e = 0; e < P.edges().size(); ++e)
    if (edge_charts_[e].empty())
      throw InvalidInput("edge " + simplex_name({P.edges()[e].a, P.edges()[e].b}) + " lies in no chart");
  for (std::size_t t = 0; t < P.triangles().size(); ++t)
    if (!tri_covered[t]) {
      const auto& tr = P.triangles()[t];
      throw InvalidInput("triangle " + simplex_name({tr.a, tr.b, tr.c}) + " lies in no chart");
    }
}

Cover Cover::single_chart(ComplexPtr parent) {
  auto whole = Subcomplex::whole(parent);
  return Cover(std::move(parent), {std::move(whole)});
}

std::vector<std::pair<int, int>> Cover::overlapping_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& cs : vertex_charts_)
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j) out.emplace_back(cs[i], cs[j]);
  sort_unique(out);
  return out;
}

Cover star_cover(const ComplexPtr& complex) {
  std::vector<Subcomplex> charts;
  charts.reserve(complex->vertex_count());
  for (VertexId v = 0; v < complex->vertex_count(); ++v) charts.push_back(Subcomplex::closed_star(complex, v));
  return Cover(complex, std::move(charts));
}

// ---------------------------------------------------------------------------

EdgePath EdgePath::reversed() const {
  return EdgePath{std::vector<VertexId>(vertices.rbegin(), vertices.rend())};
}

EdgePath EdgePath::then(const EdgePath& other) const {
  if (vertices.empty()) return other;
  if (other.vertices.empty()) return *this;
  if (end() != other.start()) throw InvalidInput("cannot concatenate paths: endpoints differ");
  EdgePath out = *this;
  out.vertices.insert(out.vertices.end(), other.vertices.begin() + 1, other.vertices.end());
  return out;
}

void validate_path(const SimplicialComplex& complex, const EdgePath& path) {
  if (path.vertices.empty()) throw InvalidInput("empty path");
  for (auto v : path.vertices)
    if (v < 0 || v >= complex.vertex_count()) throw InvalidInput("path vertex " + std::to_string(v) + " out of range");
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
    if (!complex.has_edge(path.vertices[i], path.vertices[i + 1]))
      throw InvalidInput("path steps along non-edge " + simplex_name({path.vertices[i], path.vertices[i + 1]}));
}

std::string to_string(const EdgePath& path) {
  std::ostringstream os;
  for (std::size_t i = 0; i < path.vertices.size(); ++i) os << (i ? "," : "") << path.vertices[i];
  return os.str();
}

std::vector<EdgePath> elementary_homotopy_moves(const EdgePath& path, const SimplicialComplex& complex) {
  const auto& p = path.vertices;
  std::vector<EdgePath> out;
  auto emit = [&](std::vector<VertexId> q) { out.push_back(EdgePath{std::move(q)}); };

  // Backtrack insertion at every position.
  for (std::size_t i = 0; i < p.size(); ++i)
    for (auto w : complex.neighbors(p[i])) {
      std::vector<VertexId> q(p.begin(), p.begin() + i + 1);
      q.push_back(w);
      q.insert(q.end(), p.begin() + i, p.end());
      emit(std::move(q));
    }
  // Backtrack deletion: p[i-1] == p[i+1].
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    if (p[i - 1] == p[i + 1]) {
      std::vector<VertexId> q(p.begin(), p.begin() + i);
      q.insert(q.end(), p.begin() + i + 2, p.end());
      emit(std::move(q));
    }
  // One side of a triangle -> the other two.
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto e = complex.edge_index(p[i], p[i + 1]);
    for (int t : complex.edge_triangles(*e)) {
      const auto& tr = complex.triangles()[t];
      VertexId c = tr.a + tr.b + tr.c - p[i] - p[i + 1];
      std::vector<VertexId> q(p.begin(), p.begin() + i + 1);
      q.push_back(c);
      q.insert(q.end(), p.begin() + i + 1, p.end());
      emit(std::move(q));
    }
  }
  // Two sides of a triangle -> the third.
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i - 1] == p[i + 1]) continue;
    if (complex.triangle_index(p[i - 1], p[i], p[i + 1])) {
      std::vector<VertexId> q(p.begin(), p.begin() + i);
      q.insert(q.end(), p.begin() + i + 1, p.end());
      emit(std::move(q));
    }
  }
  sort_unique(out);
  return out;
}

}  // namespace lcktk
