#include <algorithm>
#include <map>

#include "doctest.h"
#include "lcktk/covering.hpp"
#include "lcktk/errors.hpp"
#include "lcktk/fixtures.hpp"

using namespace lcktk;

namespace {

void check_projection_simplicial(const CoveringMap& c) {
  const auto& T = *c.total();
  const auto& B = *c.base();
  for (std::size_t e = 0; e < T.edges().size(); ++e) {
    const auto& te = T.edges()[e];
    const auto& be = B.edges()[c.project_edge(static_cast<int>(e))];
    auto pa = c.project(te.a), pb = c.project(te.b);
    CHECK(std::minmax(pa, pb) == std::minmax(be.a, be.b));
  }
  for (std::size_t t = 0; t < T.triangles().size(); ++t) {
    const auto& tt = T.triangles()[t];
    std::array<VertexId, 3> p{c.project(tt.a), c.project(tt.b), c.project(tt.c)};
    std::sort(p.begin(), p.end());
    const auto& bt = B.triangles()[c.project_triangle(static_cast<int>(t))];
    CHECK(p == std::array<VertexId, 3>{bt.a, bt.b, bt.c});
  }
}

}  // namespace

TEST_CASE("single triangle covers itself") {
  auto k = SimplicialComplex::build(3, {}, {{0, 1, 2}});
  auto c = universal_cover(k);
  CHECK(!c.truncated());
  CHECK(c.sheet_count() == 1);
  CHECK(*c.total() == *k);
}

TEST_CASE("universal cover of the projective plane is a 12-vertex sphere") {
  auto rp2 = fixtures::projective_plane();
  auto c = universal_cover(rp2);
  const auto& T = *c.total();
  CHECK(!c.truncated());
  CHECK(c.sheet_count() == 2);
  CHECK(T.vertex_count() == 12);
  CHECK(T.edges().size() == 30);
  CHECK(T.triangles().size() == 20);
  CHECK(T.euler_characteristic() == 2 * rp2->euler_characteristic());
  for (std::size_t e = 0; e < T.edges().size(); ++e) CHECK(T.edge_triangles(static_cast<int>(e)).size() == 2);
  // Icosahedral: every vertex has degree 5.
  for (VertexId v = 0; v < 12; ++v) CHECK(T.neighbors(v).size() == 5);
  CHECK(is_trivial_group(*edge_path_group(c.total())));
  check_projection_simplicial(c);

  int g = nontrivial_generator(*c.group());
  REQUIRE(g >= 0);
  for (VertexId x = 0; x < 12; ++x) {
    VertexId y = c.deck_vertex({g + 1}, x);
    CHECK(y != x);
    CHECK(c.project(y) == c.project(x));
    CHECK(c.deck_vertex({g + 1, g + 1}, x) == x);
    CHECK(c.deck_vertex({}, x) == x);
  }
  for (int t = 0; t < 20; ++t) CHECK(c.deck_triangle({g + 1, g + 1}, t) == t);
}

TEST_CASE("finite covers: fibers, freeness and transitivity") {
  auto c = universal_cover(fixtures::projective_plane());
  std::map<VertexId, int> fiber;
  for (VertexId x = 0; x < c.total()->vertex_count(); ++x) ++fiber[c.project(x)];
  for (auto [v, n] : fiber) CHECK(n == c.sheet_count());
  for (int gen = 0; gen < c.group()->generator_count(); ++gen) {
    auto perm = c.deck_permutation(gen);
    for (VertexId x = 0; x < 12; ++x) {
      REQUIRE(perm[x] >= 0);
      // Deck maps send edges to edges.
      for (auto y : c.total()->neighbors(x)) CHECK(c.total()->has_edge(perm[x], perm[y]));
    }
  }
}

TEST_CASE("circle unrolls to a line segment") {
  auto c3 = fixtures::cycle(3);
  auto c = universal_cover(c3, 3);
  const auto& T = *c.total();
  CHECK(c.truncated());
  CHECK(c.radius() == 3);
  CHECK(c.sheet_count() == 7);
  CHECK(T.vertex_count() == 21);
  CHECK(T.edges().size() == 20);
  CHECK(T.is_connected());
  int leaves = 0;
  for (VertexId v = 0; v < 21; ++v) {
    CHECK(T.neighbors(v).size() <= 2);
    leaves += T.neighbors(v).size() == 1;
  }
  CHECK(leaves == 2);
  check_projection_simplicial(c);

  VertexId x0 = c.basepoint_lift();
  auto g = c.deck_vertex({1}, x0);
  CHECK(c.project(g) == 0);
  CHECK(c.sheet_of(g) == *c.sheet_of_word({1}));
  CHECK(c.sheet_word(c.sheet_of(g)) == Word{1});
  // Walking the base loop once lands on the generator's lift.
  CHECK(c.lift_path(EdgePath{{0, 1, 2, 0}}, x0).end() == g);
  CHECK(c.deck_vertex({1, 1, 1}, x0) == c.lift(0, *c.sheet_of_word({1, 1, 1})));
  CHECK_THROWS_AS(c.deck_vertex({1, 1, 1, 1}, x0), TruncationError);
  CHECK_THROWS_AS(c.lift_path(c.group()->word_loop({1, 1, 1, 1}), x0), TruncationError);
}

TEST_CASE("truncation radius zero on a nontrivial group is rejected") {
  CHECK_THROWS_AS(universal_cover(fixtures::cycle(3), 0), PreconditionFailed);
  CHECK_THROWS_AS(universal_cover(fixtures::cycle(3)), InvalidInput);
  CHECK_NOTHROW(universal_cover(fixtures::icosahedron(), 0));
}

TEST_CASE("torus ball: deck maps commute with projection and preserve adjacency") {
  auto c = universal_cover(fixtures::torus(), 2);
  CHECK(c.truncated());
  CHECK(c.sheet_count() == 13);
  check_projection_simplicial(c);
  const auto& T = *c.total();
  for (VertexId x = 0; x < T.vertex_count(); ++x) {
    if (c.sheet_of(x) != 0) continue;
    for (Letter l : {1, -1, 2, -2}) {
      Word w = {l};
      VertexId y = c.deck_vertex(w, x);
      CHECK(c.project(y) == c.project(x));
      for (auto z : T.neighbors(x)) {
        if (c.sheet_of(z) != 0) continue;
        CHECK(T.has_edge(y, c.deck_vertex(w, z)));
      }
    }
  }
}

TEST_CASE("preimage of a chart and identity cover") {
  auto rp2 = fixtures::projective_plane();
  auto c = universal_cover(rp2);
  auto star = Subcomplex::closed_star(rp2, 0);
  auto pre = c.preimage(star);
  CHECK(pre.vertices().size() == 2 * star.vertices().size());
  CHECK(pre.triangles().size() == 2 * star.triangles().size());

  auto id = identity_cover(rp2);
  CHECK(*id.total() == *rp2);
  CHECK(!id.universal());
  CHECK(identity_cover(fixtures::icosahedron()).universal());
}
