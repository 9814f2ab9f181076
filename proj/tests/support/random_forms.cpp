#include "random_forms.hpp"

#include <deque>
#include <set>

namespace lcktk::testing {

ComplexPtr random_complex(int n, double extra_edge_p, double triangle_p, std::mt19937_64& rng) {
  std::set<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    int u = parent(rng);
    edges.insert({u, v});
  }
  std::bernoulli_distribution extra(extra_edge_p), tri(triangle_p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (extra(rng)) edges.insert({u, v});
  std::vector<std::array<VertexId, 2>> es;
  for (auto [u, v] : edges) es.push_back({u, v});
  std::vector<std::array<VertexId, 3>> ts;
  for (auto [u, v] : edges)
    for (int w = v + 1; w < n; ++w)
      if (edges.count({u, w}) && edges.count({v, w}) && tri(rng)) ts.push_back({u, v, w});
  return SimplicialComplex::build(n, es, ts);
}

Exact EdgeCochain::operator()(VertexId u, VertexId v) const {
  if (u < v) return on_edge.at({u, v});
  return -on_edge.at({v, u});
}

Exact EdgeCochain::along(const EdgePath& p) const {
  Exact s;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) s += (*this)(p.vertices[i], p.vertices[i + 1]);
  return s;
}

bool EdgeCochain::is_closed() const {
  for (const auto& t : complex->triangles())
    if (!((*this)(t.a, t.b) + (*this)(t.b, t.c) + (*this)(t.c, t.a)).is_zero()) return false;
  return true;
}

Rational random_rational(std::mt19937_64& rng, int num, int den) {
  std::uniform_int_distribution<int> n(-num, num), d(1, den);
  return Rational(n(rng), d(rng));
}

std::vector<std::vector<Rational>> rational_nullspace(const std::vector<std::vector<long long>>& m, int cols) {
  std::vector<std::vector<Rational>> a;
  for (const auto& row : m) a.emplace_back(row.begin(), row.end());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < static_cast<int>(a.size()); ++c) {
    int p = -1;
    for (int i = r; i < static_cast<int>(a.size()); ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(a[r], a[p]);
    Rational inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (int i = 0; i < static_cast<int>(a.size()); ++i)
      if (i != r && a[i][c] != 0) {
        Rational k = a[i][c];
        for (int j = 0; j < cols; ++j) a[i][j] -= k * a[r][j];
      }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<char> is_pivot(cols, 0);
  for (int c : pivot_col) is_pivot[c] = 1;
  std::vector<std::vector<Rational>> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -a[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

EdgeCochain random_closed_cochain(const ComplexPtr& k, std::mt19937_64& rng) {
  auto g = edge_path_group(k);
  const auto& pres = g->presentation();
  auto basis = rational_nullspace(relation_matrix(pres), pres.generators);
  std::vector<Rational> x(pres.generators, 0);
  for (const auto& b : basis) {
    Rational c = random_rational(rng);
    for (int i = 0; i < pres.generators; ++i) x[i] += c * b[i];
  }
  std::vector<Rational> h(k->vertex_count());
  for (auto& v : h) v = random_rational(rng);
  EdgeCochain w{k, {}};
  for (std::size_t e = 0; e < k->edges().size(); ++e) {
    const auto& ed = k->edges()[e];
    int gen = g->edge_generator(static_cast<int>(e));
    Rational val = (gen >= 0 ? x[gen] : Rational(0)) + h[ed.b] - h[ed.a];
    w.on_edge[{ed.a, ed.b}] = Exact(val);
  }
  return w;
}

Cover random_cover(const ComplexPtr& k, std::mt19937_64& rng) {
  auto charts = star_cover(k).charts();
  std::uniform_int_distribution<int> extra(0, 3);
  int n = extra(rng);
  for (int i = 0; i < n; ++i) {
    if (!k->triangles().empty() && (i % 2 == 0)) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(k->triangles().size()) - 1);
      const auto& t = k->triangles()[pick(rng)];
      charts.push_back(Subcomplex::induced(k, {t.a, t.b, t.c}));
    } else {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(k->edges().size()) - 1);
      int e = pick(rng);
      charts.push_back(Subcomplex::from_simplices(k, {k->edges()[e].a, k->edges()[e].b}, {e}));
    }
  }
  return Cover(k, std::move(charts));
}

ClosedOneForm<Exact> form_from_cochain(const Cover& cover, const EdgeCochain& w, std::mt19937_64& rng) {
  const auto& K = *cover.parent();
  std::vector<std::map<VertexId, Exact>> pots(cover.size());
  for (std::size_t a = 0; a < cover.size(); ++a)
    for (const auto& comp : connected_components(cover[a])) {
      Exact c(random_rational(rng));
      std::deque<VertexId> q{comp.vertices()[0]};
      pots[a][comp.vertices()[0]] = c;
      while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        for (auto v : K.neighbors(u)) {
          if (!comp.contains_edge(*K.edge_index(u, v)) || pots[a].count(v)) continue;
          pots[a][v] = pots[a][u] + w(u, v);
          q.push_back(v);
        }
      }
    }
  return ClosedOneForm<Exact>::make(cover, pots);
}

ClosedOneForm<Exact> subdivide(const ClosedOneForm<Exact>& theta, std::mt19937_64& rng) {
  const auto& K = *theta.complex();
  std::vector<Subcomplex> charts;
  std::vector<std::vector<Exact>> pots;
  auto add_piece = [&](int a, Subcomplex piece) {
    Exact c(random_rational(rng));
    std::vector<Exact> p;
    for (auto v : piece.vertices()) p.push_back(theta.value(a, v) + c);
    charts.push_back(std::move(piece));
    pots.push_back(std::move(p));
  };
  for (std::size_t a = 0; a < theta.cover().size(); ++a) {
    const auto& ch = theta.cover()[a];
    std::set<int> covered_edges;
    std::set<VertexId> covered_vertices;
    for (int t : ch.triangles()) {
      const auto& tr = K.triangles()[t];
      add_piece(static_cast<int>(a), Subcomplex::from_simplices(theta.complex(), {tr.a, tr.b, tr.c}, {}, {t}));
      for (int e : K.triangle_edges(t)) covered_edges.insert(e);
    }
    for (int e : ch.edges()) {
      const auto& ed = K.edges()[e];
      covered_vertices.insert(ed.a);
      covered_vertices.insert(ed.b);
      if (!covered_edges.count(e)) add_piece(static_cast<int>(a), Subcomplex::from_simplices(theta.complex(), {ed.a, ed.b}, {e}));
    }
    for (auto v : ch.vertices())
      if (!covered_vertices.count(v)) add_piece(static_cast<int>(a), Subcomplex::from_simplices(theta.complex(), {v}, {}));
  }
  return ClosedOneForm<Exact>::make(Cover(theta.complex(), std::move(charts)), std::move(pots));
}

}  // namespace lcktk::testing
