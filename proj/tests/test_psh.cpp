#include <doctest.h>

#include <cmath>
#include <random>

#include "lcktk/errors.hpp"
#include "lcktk/psh.hpp"
#include "lcktk/psh_fixtures.hpp"

using namespace lcktk;
using namespace lcktk::psh;

namespace {

GridDomain square_around(cd c, double half, double h) {
  return GridDomain(1, {{c.real() - half, c.real() + half, c.imag() - half, c.imag() + half}}, h);
}

FieldPtr poly1(std::vector<PolyTerm> t) { return polynomial_field(1, std::move(t)); }

// Quintic smoothstep profile of the radial cut-off as a function of the radius.
struct Profile {
  double r_in, r_out;
  double t(double r) const { return (r - r_in) / (r_out - r_in); }
  double u1(double r) const {
    if (r <= r_in || r >= r_out) return 0;
    const double s = t(r);
    return -30 * s * s * (1 - s) * (1 - s) / (r_out - r_in);
  }
  double u2(double r) const {
    if (r <= r_in || r >= r_out) return 0;
    const double s = t(r);
    return -60 * s * (1 - s) * (1 - 2 * s) / ((r_out - r_in) * (r_out - r_in));
  }
};

double bump_value(cd w, cd c, double r_in, double r_out) {
  const double r = std::abs(w - c);
  if (r <= r_in) return 1;
  if (r >= r_out) return 0;
  const double t = (r - r_in) / (r_out - r_in);
  return 1 - (10 * t * t * t - 15 * t * t * t * t + 6 * t * t * t * t * t);
}

}  // namespace

TEST_CASE("complex Hessian of quadratics is exact to rounding") {
  const auto d = square_around(cd(0.3, -0.2), 0.01, 1e-3);
  const auto node = *d.nearest_node({cd(0.3, -0.2)});
  const auto hn = complex_hessian(sample(d, *norm_squared()), node);
  CHECK(std::abs(hn(0, 0) - 1.0) < 1e-6);
  const auto hr = complex_hessian(sample(d, *poly1({{1.0, {2}, {0}}})), node);
  CHECK(std::abs(hr(0, 0)) < 1e-6);
}

TEST_CASE("complex Hessian of |z|^4 converges at second order") {
  // ∂²(zz̄)²/∂z∂z̄ = 4|z|²; the stencil error at z = 1 is exactly h².
  const auto f = poly1({{1.0, {2}, {2}}});
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) {
    const auto d = square_around(cd(1, 0), 10 * h, h);
    const auto H = complex_hessian(sample(d, *f), *d.nearest_node({cd(1, 0)}));
    err.push_back(std::abs(H(0, 0).real() - 4.0));
    CHECK(err.back() == doctest::Approx(h * h).epsilon(1e-6));
  }
  for (int i = 0; i + 1 < static_cast<int>(err.size()); ++i) {
    const double ratio = err[i] / err[i + 1];
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
}

TEST_CASE("complex Hessian is exactly Hermitian in two variables") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<PolyTerm> terms;
  for (int i = 0; i < 12; ++i) {
    std::uniform_int_distribution<int> e(0, 2);
    terms.push_back({cd(u(rng), u(rng)), {e(rng), e(rng)}, {e(rng), e(rng)}});
  }
  const auto f = polynomial_field(2, terms);
  const GridDomain d(2, {{-0.5, 0.5, -0.5, 0.5}, {-0.5, 0.5, -0.5, 0.5}}, 0.125);
  const auto g = sample(d, *f);
  for (std::size_t n = 0; n < d.size(); n += 37) {
    if (d.boundary_distance(n) < 2) continue;
    const auto H = complex_hessian(g, n);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) CHECK(H(k, j) == std::conj(H(j, k)));
    const auto Hf = complex_hessian(*f, d.point(n), d.h());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(Hf.a[i] - H.a[i]) < 1e-9);
  }
}

TEST_CASE("off-diagonal Hessian entry matches the symbolic value") {
  // f = Re(z1 z̄2) = ½(z1 z̄2 + z̄1 z2): ∂²f/∂z1∂z̄2 = ½.
  const auto f = polynomial_field(2, {{1.0, {1, 0}, {0, 1}}});
  const GridDomain d(2, {{-0.5, 0.5, -0.5, 0.5}, {-0.5, 0.5, -0.5, 0.5}}, 0.125);
  const auto H = complex_hessian(sample(d, *f), Point{cd(0.125, 0), cd(0, 0.25)});
  CHECK(std::abs(H(0, 1) - 0.5) < 1e-12);
  CHECK(std::abs(H(1, 0) - 0.5) < 1e-12);
  CHECK(std::abs(H(0, 0)) < 1e-12);
}

TEST_CASE("boundary proximity and bad grids are rejected") {
  const auto d = square_around(cd(0, 0), 1, 0.25);
  const auto g = sample(d, *norm_squared());
  CHECK_THROWS_AS(complex_hessian(g, std::size_t{0}), InvalidInput);
  CHECK_THROWS_AS(complex_hessian(g, d.ravel({1, 4, 0, 0})), InvalidInput);
  CHECK_NOTHROW(complex_hessian(g, d.ravel({2, 4, 0, 0})));
  CHECK_THROWS_AS(GridDomain(1, {{0, 1, 0, 1}}, 0.3), InvalidInput);
  CHECK_THROWS_AS(GridDomain(1, {{0, 1, 0, 1}}, 0.5), InvalidInput);
  CHECK_THROWS_AS(GridDomain(3, {{0, 1, 0, 1}}, 0.25), InvalidInput);
  CHECK_THROWS_AS(is_strongly_psh(g, Region::box_region({{-1, 1, -1, 1}}), 0.5), InvalidInput);
  CHECK_THROWS_AS(sampled_field({d, {1.0, 2.0}}), InvalidInput);
}

TEST_CASE("strong plurisubharmonicity checks") {
  const auto d = square_around(cd(0, 0), 1, 1.0 / 32);
  const auto r = Region::box_region({{-0.5, 0.5, -0.5, 0.5}});
  auto c = is_strongly_psh(sample(d, *norm_squared()), r, 0.5);
  CHECK(c.pass);
  CHECK(c.worst == doctest::Approx(1.0).epsilon(1e-9));
  c = is_strongly_psh(sample(d, *poly1({{1.0, {2}, {0}}})), r, 1e-6);
  CHECK_FALSE(c.pass);
  CHECK(std::abs(c.worst) < 1e-9);
  // The real Hessian of |z|² + 10 Re z² is indefinite; the complex one is 1.
  c = is_strongly_psh(sample(d, *poly1({{1.0, {1}, {1}}, {10.0, {2}, {0}}})), r, 0.5);
  CHECK(c.pass);
  CHECK(c.worst == doctest::Approx(1.0).epsilon(1e-6));
  // A negative spot is localized.
  const auto bad = poly1({{1.0, {1}, {1}}, {-1.0, {2}, {2}}});  // |z|² − |z|⁴: 1 − 4|z|²
  c = is_strongly_psh(sample(d, *bad), r, 1e-6);
  CHECK_FALSE(c.pass);
  CHECK(c.worst < 0);
  CHECK(std::abs(c.worst_point[0]) > 0.5);
}

TEST_CASE("pluriharmonic checks") {
  const auto d = square_around(cd(0, 0), 1, 1.0 / 32);
  const auto r = Region::interior();
  CHECK(is_pluriharmonic(sample(d, *poly1({{1.0, {2}, {0}}})), r, 1e-9).pass);
  CHECK_FALSE(is_pluriharmonic(sample(d, *norm_squared()), r, 1e-3).pass);
  // Re(z³) − 5 Im z = Re(z³ + 5i z).
  CHECK(is_pluriharmonic(sample(d, *poly1({{1.0, {3}, {0}}, {cd(0, 5), {1}, {0}}})), r, 1e-9).pass);
}

TEST_CASE("real parts of random holomorphic polynomials are pluriharmonic at tol 10 h^2") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  const double h = 1.0 / 32;
  const auto d1 = square_around(cd(0, 0), 1, h);
  const GridDomain d2(2, {{-0.5, 0.5, -0.5, 0.5}, {-0.5, 0.5, -0.5, 0.5}}, 1.0 / 16);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PolyTerm> t1;
    for (int k = 0; k <= 4; ++k) t1.push_back({cd(u(rng), u(rng)), {k}, {0}});
    CHECK(is_pluriharmonic(sample(d1, *poly1(t1)), Region::interior(), 10 * h * h).pass);
    std::vector<PolyTerm> t2;
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b) t2.push_back({cd(u(rng), u(rng)), {a, b}, {0, 0}});
    CHECK(is_pluriharmonic(sample(d2, *polynomial_field(2, t2)), Region::interior(), 10 * d2.h() * d2.h()).pass);
  }
}

TEST_CASE("holomorphic map Jacobian is exact") {
  // g(z1, z2) = (z1² z2 + 3i, 2 z2³)
  HolomorphicMap g(2, 2, {{{{2, 1}, 1.0}, {{0, 0}, cd(0, 3)}}, {{{0, 3}, 2.0}}});
  const Point z{cd(0.5, 1), cd(-1, 0.25)};
  const auto J = g.jacobian(z);
  CHECK(J[0][0] == 2.0 * z[0] * z[1]);
  CHECK(J[0][1] == z[0] * z[0]);
  CHECK(J[1][0] == 0.0);
  CHECK(std::abs(J[1][1] - 6.0 * z[1] * z[1]) < 1e-15);
  CHECK(std::abs(g(z)[0] - (z[0] * z[0] * z[1] + cd(0, 3))) < 1e-15);
  CHECK_THROWS_AS(HolomorphicMap(1, 1, {{{{1, 1}, 1.0}}}), InvalidInput);
}

TEST_CASE("restricted eigenvalue uses only the range of the Jacobian") {
  Hermitian H;
  H.n = 2;
  H(0, 0) = 1;
  H(1, 1) = -3;
  CHECK(restricted_min_eigenvalue(H, {{cd(2)}, {cd(0)}}) == doctest::Approx(1));
  CHECK(restricted_min_eigenvalue(H, {{cd(1), cd(0)}, {cd(0), cd(1)}}) == doctest::Approx(-3));
  CHECK(std::isinf(restricted_min_eigenvalue(H, {{cd(0)}, {cd(0)}})));
}

TEST_CASE("validation of the identity configuration") {
  const auto rep = validate_well_related(identity_spec());
  for (const auto& c : rep.conditions) CHECK_MESSAGE(c.pass, c.detail);
  auto bad = identity_spec();
  bad.sources[0].phi = poly1({{1.0, {1}, {0}}});
  const auto r2 = validate_well_related(bad);
  CHECK(r2.conditions[0].pass);
  CHECK_FALSE(r2.conditions[2].pass);
  REQUIRE_FALSE(r2.conditions[2].witnesses.empty());
  CHECK(r2.conditions[2].witnesses.front().chart == 0);
  CHECK_THROWS_AS(prepare(bad), PreconditionFailed);
}

TEST_CASE("containment failures are condition 2") {
  auto s = identity_spec();
  s.targets[0].tau = radial_bump({cd(0, 0)}, 0.9, 1.2);  // reaches outside V
  auto rep = validate_well_related(s);
  CHECK_FALSE(rep.conditions[1].pass);
  s = identity_spec();
  s.targets[0].V = Region::box_region({{-1.5, 1.5, -1.5, 1.5}});
  rep = validate_well_related(s);
  CHECK_FALSE(rep.conditions[1].pass);
}

TEST_CASE("component test on the square map") {
  const auto spec = square_map_spec(1.0 / 32);
  const auto rep = validate_well_related(spec);
  for (const auto& c : rep.conditions) CHECK_MESSAGE(c.pass, c.detail);
  // Oracle: a node of chart 0 is a preimage point of V_0 with Re z > 0; and every such point is in chart 0.
  const auto& S = spec.source;
  std::size_t count = 0, expected = 0;
  for (std::size_t n = 0; n < S.size(); ++n) {
    const cd z = S.point(n)[0], w = z * z;
    const bool in_v = w.real() >= 0.15 && w.real() <= 1.95 && w.imag() >= -0.9 && w.imag() <= 0.9;
    if (in_v && z.real() > 0) ++expected;
    if (rep.components[0][n]) {
      ++count;
      CHECK(z.real() > 0);
    }
  }
  CHECK(count == expected);

  auto merged = spec;
  merged.sources[0].selector = Region::box_region({{-10, 10, -10, 10}});
  const auto r2 = validate_well_related(merged);
  CHECK_FALSE(r2.conditions[3].pass);
  REQUIRE_FALSE(r2.conditions[3].witnesses.empty());
  CHECK(r2.conditions[3].witnesses.front().value == 2);
}

TEST_CASE("corrupted square map fails at condition 3 with a witness") {
  const auto rep = validate_well_related(square_map_corrupted_spec(1.0 / 32));
  CHECK(rep.conditions[3].pass);
  CHECK_FALSE(rep.conditions[2].pass);
  REQUIRE_FALSE(rep.conditions[2].witnesses.empty());
  const auto& w = rep.conditions[2].witnesses.front();
  CHECK(w.chart == 0);
  CHECK(w.point.size() == 1);
  CHECK(std::abs(w.value) < 1e-6);
}

TEST_CASE("Levi constants match a dense analytic sweep") {
  const double h = 1.0 / 64;
  const auto spec = levi_example_spec(h);
  const auto nodes = region_nodes(spec.source, Region::annulus({cd(0, 0)}, 0.8, 1.2));
  const auto k = levi_constants(spec, 0, nodes);

  // Oracle at h/4 from the closed forms: ψ = |w|² and φ = |z|² give p = q = 1;
  // for the radial cut-off u(|w|), ∂∂̄u = (u'' + u'/r)/4 and |∂u| = |u'|/2.
  const Profile prof{0.5, 2.0};
  double b = 0, c = 0;
  const double hd = h / 4;
  for (double x = -1.2; x <= 1.2; x += hd)
    for (double y = -1.2; y <= 1.2; y += hd) {
      const double rz = std::hypot(x, y);
      if (rz < 0.8 || rz > 1.2) continue;
      const double r = rz * rz;
      b = std::max(b, rz * rz * 0.25 * std::abs(prof.u2(r) + prof.u1(r) / r));
      c = std::max(c, 0.5 * std::abs(prof.u1(r)) * rz);
    }
  CHECK(k.p_raw == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(k.q_raw == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(k.b_raw == doctest::Approx(b).epsilon(0.05));
  CHECK(k.c_raw == doctest::Approx(c).epsilon(0.05));
  CHECK(k.p == doctest::Approx(0.8 * k.p_raw));
  CHECK(k.b == doctest::Approx(1.25 * k.b_raw));

  // Where the cut-off is identically 1 its derivatives vanish.
  const auto inner = region_nodes(spec.source, Region::annulus({cd(0, 0)}, 0.3, 0.6));
  const auto k0 = levi_constants(spec, 0, inner);
  CHECK(k0.b_raw == 0.0);
  CHECK(k0.c_raw == 0.0);

  // φ = Re z² is rejected.
  auto bad = spec;
  bad.sources[0].phi = poly1({{1.0, {2}, {0}}});
  CHECK_THROWS_AS(levi_constants(bad, 0, nodes), PreconditionFailed);
}

TEST_CASE("plan with vanishing b and c returns epsilon 1") {
  const auto pc = prepare(identity_spec());
  auto k = chart_constants(pc);
  k[0].b = k[0].c = 0;
  const auto plan = epsilon_plan(pc, k);
  CHECK(plan.epsilon[0] == 1.0);
  CHECK(plan.check.pass());
  k[0].q = 0;
  CHECK_THROWS_AS(epsilon_plan(pc, k), PreconditionFailed);
}

TEST_CASE("square map pipeline: plan soundness, overlaps, glued psh") {
  const auto spec = square_map_spec(1.0 / 64);
  const auto pc = prepare(spec);
  const auto k = chart_constants(pc);
  const auto plan = epsilon_plan(pc, k);
  CHECK(plan.check.pass());
  // Mirror-image charts carry identical constants and equal ε.
  for (int a = 0; a < 8; a += 2) CHECK(plan.epsilon[a] == doctest::Approx(plan.epsilon[a + 1]).epsilon(1e-12));

  // Independent re-verification: cut-offs recomputed from the closed form of the configuration.
  const auto& S = spec.source;
  std::vector<cd> centers{1.05, cd(0, 1.05), -1.05, cd(0, -1.05)};
  std::size_t samples = 0, bad = 0, bad_half = 0;
  for (const auto& r : plan.regions) {
    for (std::size_t n = 0; n < S.size(); ++n) {
      if (!pc.report.components[r.chart][n] || S.boundary_distance(n) < 2) continue;
      const cd z = S.point(n)[0];
      if (bump_value(z * z, centers[spec.sources[r.chart].target], 0.6, 0.85) <= 0) continue;
      double B = 0, C = 0, Q = 0;
      for (int b : r.index) {
        if (!pc.report.components[b][n]) continue;
        const double t = bump_value(z * z, centers[spec.sources[b].target], 0.6, 0.85);
        B += 2 * plan.epsilon[b] * k[b].b * t;
        C += 2 * plan.epsilon[b] * k[b].c * t;
        Q += plan.epsilon[b] * k[b].q * t * t;
      }
      ++samples;
      if (!((r.P - B) * Q > C * C)) ++bad;
      if (B > r.P / 2) ++bad_half;
    }
  }
  CHECK(samples == plan.check.samples);
  CHECK(bad == 0);
  CHECK(bad_half == 0);

  const auto glue = glue_potentials(pc, plan.epsilon);
  CHECK(!glue.overlaps.empty());
  for (const auto& o : glue.overlaps) CHECK_MESSAGE(o.check.pass, o.a, "-", o.b, " ", o.check.worst);
  const auto v = verify_glued_psh(pc, glue, 1e-6);
  CHECK(v.pass());
  for (const auto& c : v.charts) CHECK(c.worst >= 1e-6);
}

TEST_CASE("glue is affine in epsilon and overlap differences do not depend on it") {
  const auto pc = prepare(square_map_spec(1.0 / 32));
  std::vector<double> e1(8, 0.01), e2 = e1, e3 = e1;
  e2[2] = 0.02;
  e3[2] = 0.03;
  const auto g1 = glue_potentials(pc, e1), g2 = glue_potentials(pc, e2), g3 = glue_potentials(pc, e3);
  for (std::size_t n = 0; n < g1.phi_eps.values.size(); ++n) {
    const double d1 = g2.glued[2].values[n] - g1.glued[2].values[n];
    const double d2 = g3.glued[2].values[n] - g2.glued[2].values[n];
    CHECK(std::abs(d1 - d2) <= 1e-12 * std::max(1.0, std::abs(g3.glued[2].values[n])));
  }
  for (const auto& o : g1.overlaps) {
    const auto a = overlap_difference(g1, o.a, o.b), b = overlap_difference(g3, o.a, o.b);
    CHECK(a.values == b.values);
  }
  // ε → 0 is monotone: φ_ε shrinks pointwise.
  std::vector<double> small(8, 0.001);
  const auto gs = glue_potentials(pc, small);
  for (std::size_t n = 0; n < gs.phi_eps.values.size(); ++n) CHECK(gs.phi_eps.values[n] <= g1.phi_eps.values[n]);
  CHECK_THROWS_AS(glue_potentials(pc, std::vector<double>(8, 0.0)), InvalidInput);
  CHECK_THROWS_AS(glue_potentials(pc, std::vector<double>(3, 0.1)), InvalidInput);
}

TEST_CASE("glue where the cut-off is 1 adds epsilon times phi") {
  const auto spec = identity_spec();
  const auto pc = prepare(spec);
  const auto g = glue_potentials(pc, {0.25});
  int hits = 0;
  for (std::size_t n = 0; n < spec.source.size(); ++n) {
    if (pc.charts[0].T[n] != 1.0) continue;
    const Point x = spec.source.point(n);
    CHECK(g.glued[0].values[n] == (*spec.targets[0].psi)(x) + 0.25 * (*spec.sources[0].phi)(x));
    ++hits;
  }
  CHECK(hits > 0);
}

TEST_CASE("any epsilon below the plan keeps the glued potentials psh") {
  const auto pc = prepare(identity_spec());
  const auto plan = epsilon_plan(pc, chart_constants(pc));
  REQUIRE(plan.check.pass());
  for (double scale : {1.0, 0.1, 0.01, 0.001}) {
    const auto v = verify_glued_psh(pc, glue_potentials(pc, {plan.epsilon[0] * scale}), 1e-6);
    CHECK(v.pass());
  }
}

TEST_CASE("inflated epsilon on a steep cut-off is localized") {
  auto spec = identity_spec(1.0 / 32);
  spec.targets[0].tau = radial_bump({cd(0, 0)}, 0.3, 0.4);
  const auto pc = prepare(spec);
  const auto plan = epsilon_plan(pc, chart_constants(pc));
  const auto glue = glue_potentials(pc, {1e3 * plan.epsilon[0]});
  const auto v = verify_glued_psh(pc, glue, 1e-6);
  const auto& c = v.charts[0];
  if (!c.pass) {
    CHECK(c.worst < 1e-6);
    CHECK(min_eigenvalue(complex_hessian(glue.glued[0], c.worst_node)) == c.worst);
    CHECK(pc.charts[0].T[c.worst_node] > 0);
  }
}

TEST_CASE("run_pipeline on the fixtures") {
  auto r = run_pipeline(identity_spec());
  CHECK(r.pass());
  r = run_pipeline(square_map_corrupted_spec(1.0 / 32));
  CHECK(r.failed_stage == "validate");
}

TEST_CASE("grid-backed LCK compatibility") {
  const auto da = GridDomain(1, {{-1, 0.5, -1, 1}}, 1.0 / 16);
  const auto db = GridDomain(1, {{-0.5, 1, -1, 1}}, 1.0 / 16);
  const auto pa = sample(da, *norm_squared());
  const auto pb = sample(db, *poly1({{2.0, {1}, {1}}, {1.0, {2}, {0}}}));
  // e^{f_a} Hφ_a = e^{f_b} Hφ_b with Hφ_b = 2 Hφ_a means f_a − f_b = log 2.
  auto rep = check_grid_lck({pa, pb}, {{0, 1, std::log(2.0)}}, true, 1e-6, 1e-9);
  CHECK(rep.pass);
  CHECK(rep.pairs[0].samples > 0);
  rep = check_grid_lck({pa, pb}, {{0, 1, 0.0}}, true, 1e-6, 1e-9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.pairs[0].deviation == doctest::Approx(0.5));
  const auto dc = GridDomain(1, {{-0.49, 1.01, -1, 1}}, 1.0 / 16);
  CHECK_THROWS_AS(check_grid_lck({pa, sample(dc, *norm_squared())}, {{0, 1, 0.0}}, true, 1e-6, 1e-9), InvalidInput);
  // Merely psh potentials pass only in the psh mode.
  const auto flat = sample(da, *poly1({{1.0, {2}, {0}}}));
  CHECK_FALSE(check_grid_lck({flat}, {}, true, 1e-6, 1e-9).pass);
  CHECK(check_grid_lck({flat}, {}, false, 1e-6, 1e-9).pass);
}

TEST_CASE("character-scaled family") {
  const auto d = square_around(cd(0, 0), 1, 0.25);
  const auto phi = sample(d, *norm_squared(1.0));

  const auto trivial = character_scaled_family(phi, Exact(0), 3);
  for (const auto& m : trivial.members) CHECK(m.values == phi.values);

  const auto two = character_scaled_family(phi, Exact::log(2), 2);
  for (std::size_t n = 0; n < phi.values.size(); ++n)
    CHECK(two.members[1].values[n] == doctest::Approx(2 * two.members[0].values[n]).epsilon(1e-14));
  CHECK(two.act(1, 0) == ScaledFamily::Action{1, Exact::log(2)});
  CHECK(two.act(1, 1) == ScaledFamily::Action{0, Exact::log(2)});

  const auto f = character_scaled_family(phi, Exact::log(3), 4);
  CHECK(f.act(2, 1) == ScaledFamily::Action{3, Exact::log(9)});
  // Composition law over all indices: act by j, then j', equals act by j + j'.
  int checked = 0;
  for (int j = 0; j < 4; ++j)
    for (int jp = 0; jp < 4; ++jp)
      for (int k = 0; k < 4; ++k) {
        const auto first = f.act(j, k);
        const auto second = f.act(jp, first.index);
        const auto direct = f.act(j + jp, k);
        CHECK(second.index == direct.index);
        CHECK(first.log_factor + second.log_factor == direct.log_factor);
        ++checked;
      }
  CHECK(checked == 64);
  // Value identity φ_k = e^{jρ} φ_{k−j} on pairs that do not wrap around ℤ/m.
  for (int j = 0; j < 4; ++j)
    for (int k = j; k < 4; ++k) {
      const auto a = f.act(j, k);
      CHECK(a.index == k - j);
      const double s = std::exp(a.log_factor.to_double());
      for (std::size_t n = 0; n < phi.values.size(); ++n)
        CHECK(f.members[k].values[n] == doctest::Approx(s * f.members[a.index].values[n]).epsilon(1e-12));
    }
  CHECK_THROWS_AS(character_scaled_family(phi, Exact::log(3), 0), InvalidInput);
}
