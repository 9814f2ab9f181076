#include "lcktk/psh_fixtures.hpp"

#include <cmath>
#include <numbers>

namespace lcktk::psh {

FieldPtr norm_squared(double constant) {
  std::vector<PolyTerm> t{{1.0, {1}, {1}}};
  if (constant != 0) t.push_back({constant, {0}, {0}});
  return polynomial_field(1, std::move(t));
}

MapPtr power_map(int k) {
  return std::make_shared<HolomorphicMap>(1, 1, std::vector<std::vector<HolomorphicMap::Monomial>>{{{{k}, 1.0}}});
}

WellRelatedSpec square_map_spec(double h) {
  WellRelatedSpec s;
  s.source = GridDomain(1, {{-1.5625, 1.5625, -1.5625, 1.5625}}, h);
  s.target = GridDomain(1, {{-2.25, 2.25, -2.25, 2.25}}, 1.0 / 32);
  s.map = power_map(2);
  const double half = 0.9, radius = 1.05;
  for (int k = 0; k < 4; ++k) {
    const cd c = std::polar(radius, k * std::numbers::pi / 2);
    const cd a = std::polar(0.1, k * 0.7);
    const double cr = std::round(c.real() * 1e12) / 1e12, ci = std::round(c.imag() * 1e12) / 1e12;
    TargetChart t;
    t.V = Region::box_region({{cr - half, cr + half, ci - half, ci + half}});
    t.psi = polynomial_field(1, {{1.0, {1}, {1}}, {a, {1}, {0}}});
    t.tau = radial_bump({cd(cr, ci)}, 0.6, 0.85);
    s.targets.push_back(std::move(t));
  }
  // Components of g⁻¹(V_k): split by the sign of Re z for k = 0, 1, 3 and of Im z for k = 2.
  const double big = 10;
  const Box right{0, big, -big, big}, left{-big, 0, -big, big}, upper{-big, big, 0, big}, lower{-big, big, -big, 0};
  const std::vector<std::pair<int, Box>> selectors{{0, right}, {0, left},  {1, right}, {1, left},
                                                   {2, upper}, {2, lower}, {3, right}, {3, left}};
  for (const auto& [k, box] : selectors)
    s.sources.push_back({k, Region::box_region({box}), norm_squared(1.0)});
  return s;
}

WellRelatedSpec square_map_corrupted_spec(double h) {
  auto s = square_map_spec(h);
  s.sources[0].phi = polynomial_field(1, {{1.0, {2}, {0}}, {3.0, {0}, {0}}});
  return s;
}

WellRelatedSpec identity_spec(double h) {
  WellRelatedSpec s;
  s.source = GridDomain(1, {{-1.5, 1.5, -1.5, 1.5}}, h);
  s.target = s.source;
  s.map = std::make_shared<HolomorphicMap>(HolomorphicMap::identity(1));
  s.targets.push_back({Region::box_region({{-1, 1, -1, 1}}), norm_squared(1.0), radial_bump({cd(0, 0)}, 0.3, 0.9)});
  s.sources.push_back({0, Region::box_region({{-1, 1, -1, 1}}), norm_squared(1.0)});
  return s;
}

WellRelatedSpec levi_example_spec(double h) {
  WellRelatedSpec s;
  s.source = GridDomain(1, {{-2, 2, -2, 2}}, h);
  s.target = GridDomain(1, {{-2.5, 2.5, -2.5, 2.5}}, 1.0 / 32);
  s.map = power_map(2);
  s.targets.push_back({Region::box_region({{-2.2, 2.2, -2.2, 2.2}}), norm_squared(), radial_bump({cd(0, 0)}, 0.5, 2.0)});
  s.sources.push_back({0, Region::box_region({{-2, 2, -2, 2}}), norm_squared()});
  return s;
}

}  // namespace lcktk::psh
