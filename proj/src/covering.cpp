#include "lcktk/covering.hpp"

#include <algorithm>

#include "lcktk/errors.hpp"

namespace lcktk {

std::optional<int> CoveringMap::act(int sheet, const Word& w) const {
  auto r = table_.trace(sheet, w);
  if (!r || *r >= sheets_) return std::nullopt;
  return r;
}

std::optional<int> CoveringMap::sheet_of_word(const Word& g) const {
  return act(0, group_->simplified().rewrite(g));
}

void CoveringMap::materialize() {
  const auto& B = *base();
  n_ = B.vertex_count();
  auto reps = table_.representatives();
  sheet_words_.assign(reps.begin(), reps.begin() + sheets_);
  const auto& simp = group_->simplified();

  std::vector<Word> edge_words;
  for (const auto& e : B.edges()) edge_words.push_back(simp.rewrite(group_->edge_word(e.a, e.b)));

  std::vector<std::array<VertexId, 2>> edges;
  std::vector<int> edge_src;
  for (int s = 0; s < sheets_; ++s)
    for (int e = 0; e < static_cast<int>(B.edges().size()); ++e) {
      auto t = act(s, edge_words[e]);
      if (!t) continue;
      edges.push_back({lift(B.edges()[e].a, s), lift(B.edges()[e].b, *t)});
      edge_src.push_back(e);
    }
  std::vector<std::array<VertexId, 3>> tris;
  std::vector<int> tri_src;
  for (int s = 0; s < sheets_; ++s)
    for (int t = 0; t < static_cast<int>(B.triangles().size()); ++t) {
      const auto& tr = B.triangles()[t];
      auto ab = B.triangle_edges(t);
      auto sb = act(s, edge_words[ab[0]]);
      auto sc = act(s, edge_words[ab[2]]);
      if (!sb || !sc) continue;
      auto sc2 = act(*sb, edge_words[ab[1]]);
      if (!sc2) continue;
      if (*sc2 != *sc)
        throw Error("inconsistent coset table while lifting triangle " + std::to_string(t));
      tris.push_back({lift(tr.a, s), lift(tr.b, *sb), lift(tr.c, *sc)});
      tri_src.push_back(t);
    }
  total_ = SimplicialComplex::build(n_ * sheets_, edges, tris);
  const auto& T = *total_;
  if (T.edges().size() != edges.size()) throw Error("lifted triangles introduced edges missing from the lift");
  edge_projection_.assign(T.edges().size(), -1);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edge_projection_[*T.edge_index(edges[i][0], edges[i][1])] = edge_src[i];
  triangle_projection_.assign(T.triangles().size(), -1);
  for (std::size_t i = 0; i < tris.size(); ++i)
    triangle_projection_[*T.triangle_index(tris[i][0], tris[i][1], tris[i][2])] = tri_src[i];
}

CoveringMap universal_cover(const ComplexPtr& complex, std::optional<int> radius, VertexId basepoint,
                            const EnumerationLimits& limits) {
  CoveringMap c;
  c.group_ = edge_path_group(complex, basepoint);
  c.universal_ = true;
  const auto& simp = c.group_->simplified().presentation;
  EnumerationLimits full = limits;
  full.max_depth.reset();
  c.table_ = enumerate_cosets(simp, full);
  if (c.table_.complete) {
    c.sheets_ = c.table_.size();
  } else {
    if (!radius) throw InvalidInput("the edge-path group is not finite within the enumeration limit; a radius is required");
    if (*radius < 0) throw InvalidInput("radius must be non-negative");
    if (*radius == 0)
      throw PreconditionFailed("radius 0 requested for a nontrivial edge-path group: the cover would be a single sheet");
    std::size_t longest = 0;
    for (const auto& r : simp.relators) longest = std::max(longest, r.size());
    EnumerationLimits bounded = limits;
    bounded.max_cosets = std::max<std::size_t>(limits.max_cosets, 200000);
    bounded.max_depth = *radius + static_cast<int>(longest);
    c.table_ = enumerate_cosets(simp, bounded);
    auto dist = c.table_.distances();
    // Breadth-first numbering puts the radius ball first.
    c.sheets_ = static_cast<int>(std::count_if(dist.begin(), dist.end(), [&](int d) { return d >= 0 && d <= *radius; }));
    for (int s = 0; s < c.sheets_; ++s)
      if (dist[s] < 0 || dist[s] > *radius) throw Error("coset numbering is not breadth-first");
    c.truncated_ = true;
    c.radius_ = *radius;
  }
  c.materialize();
  return c;
}

CoveringMap identity_cover(const ComplexPtr& complex, VertexId basepoint) {
  CoveringMap c;
  c.group_ = edge_path_group(complex, basepoint);
  int g = c.group_->simplified().presentation.generators;
  c.table_.generators = g;
  c.table_.rows.assign(1, std::vector<int>(2 * g, 0));
  c.table_.complete = true;
  c.sheets_ = 1;
  c.universal_ = is_trivial_group(*c.group_);
  c.materialize();
  return c;
}

VertexId CoveringMap::deck_vertex(const Word& g, VertexId x) const {
  if (x < 0 || x >= total_->vertex_count()) throw InvalidInput("vertex " + std::to_string(x) + " is not in the total complex");
  Word w = group_->simplified().rewrite(g);
  for (Letter l : sheet_words_[sheet_of(x)]) w.push_back(l);
  auto s = table_.trace(0, free_reduce(std::move(w)));
  if (!s || *s >= sheets_)
    throw TruncationError("deck transformation " + to_string(g) + " moves vertex " + std::to_string(x) +
                          " outside the materialized region (radius " + std::to_string(radius_) + ")");
  return lift(project(x), *s);
}

int CoveringMap::deck_edge(const Word& g, int edge) const {
  const auto& e = total_->edges().at(edge);
  auto r = total_->edge_index(deck_vertex(g, e.a), deck_vertex(g, e.b));
  if (!r) throw TruncationError("image of edge " + std::to_string(edge) + " is not materialized");
  return *r;
}

int CoveringMap::deck_triangle(const Word& g, int tri) const {
  const auto& t = total_->triangles().at(tri);
  auto r = total_->triangle_index(deck_vertex(g, t.a), deck_vertex(g, t.b), deck_vertex(g, t.c));
  if (!r) throw TruncationError("image of triangle " + std::to_string(tri) + " is not materialized");
  return *r;
}

std::vector<VertexId> CoveringMap::deck_permutation(int generator) const {
  std::vector<VertexId> perm(total_->vertex_count(), -1);
  for (VertexId x = 0; x < total_->vertex_count(); ++x) {
    try {
      perm[x] = deck_vertex({generator + 1}, x);
    } catch (const TruncationError&) {
    }
  }
  return perm;
}

Subcomplex CoveringMap::preimage(const Subcomplex& chart) const {
  if (!same_complex(chart.parent(), base())) throw InvalidInput("chart does not live on the covering's base");
  std::vector<VertexId> vs;
  for (int s = 0; s < sheets_; ++s)
    for (auto v : chart.vertices()) vs.push_back(lift(v, s));
  std::vector<int> es, ts;
  for (int e = 0; e < static_cast<int>(edge_projection_.size()); ++e)
    if (chart.contains_edge(edge_projection_[e])) es.push_back(e);
  for (int t = 0; t < static_cast<int>(triangle_projection_.size()); ++t)
    if (chart.contains_triangle(triangle_projection_[t])) ts.push_back(t);
  return Subcomplex::from_simplices(total_, std::move(vs), std::move(es), std::move(ts));
}

EdgePath CoveringMap::lift_path(const EdgePath& path, VertexId start) const {
  validate_path(*base(), path);
  if (project(start) != path.start()) throw InvalidInput("lift start does not lie over the path's first vertex");
  EdgePath out{{start}};
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    VertexId cur = out.vertices.back();
    VertexId next = -1;
    for (auto w : total_->neighbors(cur))
      if (project(w) == path.vertices[i]) {
        next = w;
        break;
      }
    if (next < 0)
      throw TruncationError("lift of " + to_string(path) + " leaves the materialized region at step " + std::to_string(i));
    out.vertices.push_back(next);
  }
  return out;
}

}  // namespace lcktk
