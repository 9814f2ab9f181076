#include <deque>

#include "doctest.h"
#include "lcktk/cech.hpp"
#include "lcktk/fixtures.hpp"
#include "lcktk/models.hpp"
#include "support/random_forms.hpp"

using namespace lcktk;
using lcktk::testing::EdgeCochain;

namespace {

GlobalFunction<Exact> vertex_index_function(const ComplexPtr& k) {
  GlobalFunction<Exact> f{k, {}};
  for (int v = 0; v < k->vertex_count(); ++v) f.values.push_back(Exact(v));
  return f;
}

// Paths reachable from p by at most `depth` elementary moves.
std::set<EdgePath> orbit(const EdgePath& p, const SimplicialComplex& k, int depth) {
  std::set<EdgePath> seen{p};
  std::vector<EdgePath> frontier{p};
  for (int d = 0; d < depth; ++d) {
    std::vector<EdgePath> next;
    for (const auto& q : frontier)
      for (auto& r : elementary_homotopy_moves(q, k))
        if (seen.insert(r).second) next.push_back(r);
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace

TEST_CASE("zero and single-chart forms") {
  auto ico = fixtures::icosahedron();
  auto z = zero_form<Exact>(star_cover(ico));
  for (const auto& c : z.overlap_constants()) CHECK(c.value.is_zero());
  auto f = vertex_index_function(ico);
  auto df = differential(f);
  CHECK(df.overlap_constants().empty());
  CHECK(integrate(z, EdgePath{{0, 1, 2}}).is_zero());
  CHECK(equivalent(z, zero_form<Exact>(Cover::single_chart(ico))));
  CHECK(equivalent(differential(constant_function(ico, Exact(7))), z));
}

TEST_CASE("differential telescopes on a path") {
  auto path = SimplicialComplex::build(3, {{0, 1}, {1, 2}}, {});
  auto df = differential(vertex_index_function(path));
  CHECK(integrate(df, EdgePath{{0, 1, 2}}) == Exact(2));
  CHECK(integrate(df, EdgePath{{2, 1, 0, 1}}) == Exact(-1));
}

TEST_CASE("circle form: overlap constants and loop integral") {
  auto theta = models::circle_form(Exact(1));
  const auto& consts = theta.overlap_constants();
  int edge_components = 0;
  for (const auto& c : consts)
    if (c.component.edges().size() == 1) {
      ++edge_components;
      // f_a - f_b with a < b: +1/3 or -1/3 depending on which chart leads around the loop.
      CHECK((c.value == Exact(Rational(1, 3)) || c.value == Exact(Rational(-1, 3))));
    }
  CHECK(edge_components == 3);
  CHECK(integrate(theta, EdgePath{{0, 1, 2, 0}}) == Exact(1));
  CHECK(integrate(theta, EdgePath{{0, 2, 1, 0}}) == Exact(-1));
  CHECK(!endpoints_criterion_check(theta, EdgePath{{0, 1, 2}}, EdgePath{{0, 2}}));
  CHECK(integrate(theta, EdgePath{{0, 1, 2}}) - integrate(theta, EdgePath{{0, 2}}) == Exact(1));
  CHECK(endpoints_criterion_check(theta, EdgePath{{0, 1}}, EdgePath{{0, 2, 0, 1}}));

  auto w = equivalence_witness(theta, zero_form<Exact>(theta.cover()));
  REQUIRE(w.has_value());
  CHECK(w->witness_u != w->witness_v);
}

TEST_CASE("overlap violation names charts, component and witnesses") {
  auto c3 = fixtures::cycle(3);
  std::vector<std::vector<Exact>> p{{0, 1, 2}, {0, 0, 0}, {0, 0, 0}};
  try {
    ClosedOneForm<Exact>::make(star_cover(c3), p);
    FAIL("expected a violation");
  } catch (const OverlapViolation& v) {
    CHECK(v.chart_a == 0);
    CHECK(v.chart_b == 1);
    CHECK(v.component == std::vector<VertexId>{0, 1});
    CHECK(v.witness_u == 0);
    CHECK(v.witness_v == 1);
  }
}

TEST_CASE("float mode uses the absolute tolerance") {
  auto c3 = fixtures::cycle(3);
  std::vector<std::vector<double>> ok{{0, 1e-13, 0}, {0, 0, 0}, {0, 0, 0}};
  CHECK_NOTHROW(ClosedOneForm<double>::make(star_cover(c3), ok));
  std::vector<std::vector<double>> bad{{0, 1e-9, 0}, {0, 0, 0}, {0, 0, 0}};
  CHECK_THROWS_AS(ClosedOneForm<double>::make(star_cover(c3), bad), OverlapViolation);
  auto theta = models::circle_form(std::log(2.0));
  CHECK(std::abs(integrate(theta, EdgePath{{0, 1, 2, 0}}) - std::log(2.0)) < 1e-12);
}

TEST_CASE("complex scalars") {
  auto c3 = fixtures::cycle(3);
  using C = std::complex<double>;
  std::vector<std::vector<C>> p{{C(0, 0), C(1, 1), C(0, 0)}, {C(0, 0), C(0, 0), C(0, 0)}, {C(0, 0), C(0, 0), C(0, 0)}};
  CHECK_THROWS(ClosedOneForm<C>::make(star_cover(c3), p));
  auto theta = ClosedOneForm<C>::make(Cover::single_chart(c3), std::vector<std::vector<C>>{{C(0, 1), C(2, 0), C(0, 0)}});
  CHECK(ScalarTraits<C>::equal(integrate(theta, EdgePath{{0, 1}}), C(2, -1)));
  auto ce = ClosedOneForm<ComplexExact>::make(Cover::single_chart(c3),
                                              std::vector<std::vector<ComplexExact>>{{{0, 1}, {2, 0}, {0, 0}}});
  CHECK(integrate(ce, EdgePath{{0, 1}}) == ComplexExact(2, -1));
}

TEST_CASE("exactness and monodromy on the circle") {
  auto theta = models::circle_form(Exact::log(2));
  auto res = is_exact(theta);
  CHECK(!res);
  REQUIRE(res.witness.has_value());
  CHECK(res.witness->integral == Exact::log(2));
  CHECK(integrate(theta, res.witness->loop) == Exact::log(2));
  auto chi = monodromy_character(theta);
  REQUIRE(chi.values.size() == 1);
  CHECK(chi.values[0] == Exact::log(2));
  CHECK(std::abs(chi.exp_values()[0] - 2.0) < 1e-12);
  CHECK(chi.is_homomorphism());
  CHECK_THROWS_AS(primitive_on_simply_connected(theta), PreconditionFailed);
}

TEST_CASE("exactness recovers differentials") {
  auto ico = fixtures::icosahedron();
  std::mt19937_64 rng(5);
  GlobalFunction<Exact> g{ico, {}};
  for (int v = 0; v < 12; ++v) g.values.push_back(Exact(lcktk::testing::random_rational(rng)));
  auto theta = testing::form_from_cochain(star_cover(ico), EdgeCochain{ico, [&] {
                                                             std::map<std::pair<VertexId, VertexId>, Exact> m;
                                                             for (const auto& e : ico->edges()) m[{e.a, e.b}] = g(e.b) - g(e.a);
                                                             return m;
                                                           }()},
                                          rng);
  auto res = is_exact(theta);
  REQUIRE(res);
  for (int v = 0; v < 12; ++v) CHECK((*res.primitive)(v) == g(v) - g(0));
  auto f = primitive_on_simply_connected(theta);
  CHECK(equivalent(differential(f), theta));
  CHECK(!primitive_local_defect(theta, f));
}

TEST_CASE("projective plane: every closed form has trivial monodromy") {
  auto rp2 = fixtures::projective_plane();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    auto w = testing::random_closed_cochain(rp2, rng);
    auto theta = testing::form_from_cochain(star_cover(rp2), w, rng);
    auto chi = monodromy_character(theta);
    CHECK(chi.is_trivial());
    CHECK(is_exact(theta));
  }
}

TEST_CASE("torus monodromy matches the edge-sum oracle") {
  auto torus = fixtures::torus();
  std::mt19937_64 rng(3);
  auto w = testing::random_closed_cochain(torus, rng);
  REQUIRE(w.is_closed());
  auto theta = testing::form_from_cochain(star_cover(torus), w, rng);
  auto chi = monodromy_character(theta);
  CHECK(chi.is_homomorphism());
  for (int g = 0; g < chi.group->generator_count(); ++g) CHECK(chi.values[g] == w.along(chi.group->generator_loop(g)));
}

TEST_CASE("homotopy certificate") {
  auto theta = models::circle_form(Exact(1));
  auto c3 = theta.complex();
  auto cert = homotopy_invariant_integrate(theta, EdgePath{{0}});
  CHECK(cert.value.is_zero());
  CHECK(cert.consistent);

  EdgePath loop{{0, 1, 2, 0}};
  EdgePath twice{{0, 1, 2, 0, 1, 2, 0}};
  auto c1 = homotopy_invariant_integrate(theta, loop, {4, 100000, 8}, 7);
  auto c2 = homotopy_invariant_integrate(theta, twice, {4, 100000, 8}, 7);
  CHECK(c1.value == Exact(1));
  CHECK(c2.value == Exact(2));
  CHECK(c1.consistent);
  CHECK(c2.consistent);
  CHECK(c1.complete);
  auto o1 = orbit(loop, *c3, 4);
  auto o2 = orbit(twice, *c3, 4);
  for (const auto& p : o1) CHECK(!o2.count(p));
  for (const auto& p : o1) CHECK(p.edge_count() > 0);

  auto small = homotopy_invariant_integrate(theta, loop, {6, 20, 4});
  CHECK(!small.complete);

  auto disk = SimplicialComplex::build(3, {}, {{0, 1, 2}});
  auto z = differential(vertex_index_function(disk));
  CHECK(homotopy_invariant_integrate(z, EdgePath{{0, 1, 2, 0}}).value.is_zero());
}

TEST_CASE("pullback to the line cover has primitive k at word g^k") {
  auto theta = models::circle_form(Exact(1));
  auto pi = universal_cover(theta.complex(), 3);
  auto up = pullback_form(pi, theta);
  CHECK(!up.warnings.empty());
  auto f = primitive_on_simply_connected(up, pi.basepoint_lift());
  for (int k = -3; k <= 3; ++k) {
    Word w(std::abs(k), k > 0 ? 1 : -1);
    auto x = pi.deck_vertex(w, pi.basepoint_lift());
    CHECK(f(x) == Exact(k));
  }
  CHECK(equivalent(differential(f), up));

  auto id = identity_cover(theta.complex());
  auto same = pullback_form(id, theta);
  CHECK(same.warnings.empty());
  // Identity cover has the same total complex structure but a distinct pointer.
  CHECK(integrate(same, EdgePath{{0, 1, 2, 0}}) == Exact(1));
}

TEST_CASE("pullback on a finite cover, and naturality") {
  auto rp2 = fixtures::projective_plane();
  auto pi = universal_cover(rp2);
  std::mt19937_64 rng(17);
  auto w = testing::random_closed_cochain(rp2, rng);
  auto theta = testing::form_from_cochain(star_cover(rp2), w, rng);
  auto up = pullback_form(pi, theta);
  CHECK(up.warnings.empty());
  CHECK(up.cover().size() == 2 * theta.cover().size());
  // integrate(π*θ, p̃) = integrate(θ, π∘p̃)
  EdgePath p{{0, 1, 2, 3}};
  auto lifted = pi.lift_path(p, pi.lift(0, 1));
  CHECK(integrate(up, lifted) == integrate(theta, p));
  GlobalFunction<Exact> g{rp2, {}};
  for (int v = 0; v < 6; ++v) g.values.push_back(Exact(lcktk::testing::random_rational(rng)));
  CHECK(equivalent(pullback_form(pi, differential(g)), differential(pull_function(pi, g))));
}
