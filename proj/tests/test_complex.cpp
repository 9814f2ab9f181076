#include <algorithm>

#include "doctest.h"
#include "lcktk/complex.hpp"
#include "lcktk/errors.hpp"
#include "lcktk/fixtures.hpp"

using namespace lcktk;

namespace {

// Every edge of a closed surface lies in exactly two triangles.
bool is_closed_surface(const SimplicialComplex& k) {
  for (std::size_t e = 0; e < k.edges().size(); ++e)
    if (k.edge_triangles(static_cast<int>(e)).size() != 2) return false;
  return true;
}

}  // namespace

TEST_CASE("fixture complexes have the expected counts") {
  auto ico = fixtures::icosahedron();
  CHECK(ico->vertex_count() == 12);
  CHECK(ico->edges().size() == 30);
  CHECK(ico->triangles().size() == 20);
  CHECK(ico->euler_characteristic() == 2);
  CHECK(is_closed_surface(*ico));

  auto rp2 = fixtures::projective_plane();
  CHECK(rp2->edges().size() == 15);
  CHECK(rp2->euler_characteristic() == 1);
  CHECK(is_closed_surface(*rp2));

  auto t = fixtures::torus();
  CHECK(t->edges().size() == 21);
  CHECK(t->euler_characteristic() == 0);
  CHECK(is_closed_surface(*t));

  auto c6 = fixtures::cycle(6);
  CHECK(c6->euler_characteristic() == 0);
  CHECK(c6->is_connected());
}

TEST_CASE("build rejects malformed input") {
  CHECK_THROWS_AS(SimplicialComplex::build(3, {{0, 3}}, {}), InvalidInput);
  CHECK_THROWS_AS(SimplicialComplex::build(3, {{1, 1}}, {}), InvalidInput);
  CHECK_THROWS_AS(SimplicialComplex::build(3, {{0, 1}, {1, 0}}, {}), InvalidInput);
  CHECK_THROWS_AS(SimplicialComplex::build(3, {}, {{0, 1, 2}, {2, 1, 0}}), InvalidInput);
  auto k = SimplicialComplex::build(3, {}, {{2, 0, 1}});
  CHECK(k->edges().size() == 3);
  CHECK(k->triangle_index(1, 2, 0).has_value());
}

TEST_CASE("closed stars of a cycle are two-edge paths") {
  auto c3 = fixtures::cycle(3);
  auto cover = star_cover(c3);
  REQUIRE(cover.size() == 3);
  for (int v = 0; v < 3; ++v) {
    CHECK(cover[v].vertices().size() == 3);
    CHECK(cover[v].edges().size() == 2);
  }
  auto overlap = cover[0].intersect(cover[1]);
  auto comps = connected_components(overlap);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].vertices() == std::vector<VertexId>{0, 1});
  CHECK(comps[0].edges().size() == 1);
  CHECK(comps[1].vertices() == std::vector<VertexId>{2});
}

TEST_CASE("cover validation") {
  auto c3 = fixtures::cycle(3);
  auto a = Subcomplex::induced(c3, {0, 1});
  auto b = Subcomplex::induced(c3, {1, 2});
  CHECK_THROWS_AS(Cover(c3, {a, b}), InvalidInput);
  CHECK_NOTHROW(Cover(c3, {a, b, Subcomplex::induced(c3, {0, 2})}));
  auto c4 = fixtures::cycle(4);
  CHECK_THROWS_AS(Cover(c3, {a, b, Subcomplex::induced(c4, {0, 2})}), InvalidInput);
}

TEST_CASE("components of a disconnected subcomplex") {
  auto c6 = fixtures::cycle(6);
  auto sub = Subcomplex::induced(c6, {0, 1, 3, 4});
  auto comps = connected_components(sub);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].vertices() == std::vector<VertexId>{0, 1});
  CHECK(comps[1].vertices() == std::vector<VertexId>{3, 4});
}

TEST_CASE("elementary moves preserve endpoints and adjacency") {
  auto ico = fixtures::icosahedron();
  EdgePath p{{0, 1, 2, 0}};
  auto moves = elementary_homotopy_moves(p, *ico);
  CHECK(!moves.empty());
  CHECK(std::is_sorted(moves.begin(), moves.end()));
  for (const auto& m : moves) {
    CHECK(m.start() == 0);
    CHECK(m.end() == 0);
    CHECK_NOTHROW(validate_path(*ico, m));
  }
  // The triangle {0,1,2} lets 0,1,2 collapse to 0,2.
  CHECK(std::find(moves.begin(), moves.end(), EdgePath{{0, 2, 0}}) != moves.end());
  CHECK_THROWS_AS(validate_path(*ico, EdgePath{{0, 11}}), InvalidInput);
}
