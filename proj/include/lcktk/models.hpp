#pragma once

#include "lcktk/cech.hpp"
#include "lcktk/conformal.hpp"
#include "lcktk/fixtures.hpp"

namespace lcktk::models {

/// Closed form on the star cover of C₃ whose three overlap components (one
/// per edge) each carry the constant L/3, so the loop 0,1,2,0 integrates to L.
template <class S>
ClosedOneForm<S> circle_form(const S& loop_integral) {
  auto c3 = fixtures::cycle(3);
  auto third = [&](long long k) {
    if constexpr (std::is_same_v<S, Exact>) return loop_integral * Rational(k, 3);
    else return loop_integral * (static_cast<double>(k) / 3.0);
  };
  std::vector<std::vector<S>> p{{third(0), third(1), third(2)}, {third(-1), third(0), third(4)},
                                {third(1), third(-1), third(3)}};
  return ClosedOneForm<S>::make(star_cover(c3), std::move(p));
}

/// LCK data on the star cover of C₃ with abstract potentials "phi0".."phi2"
/// and conformal factors whose Lee form has loop integral L.
template <class S>
LCKData<S> circle_lck(const S& loop_integral) {
  std::vector<PotentialHandle<S>> h;
  for (int a = 0; a < 3; ++a) h.push_back({PotentialHandle<S>::Kind::abstract, "phi" + std::to_string(a), S{}});
  return LCKData<S>::make(circle_form(loop_integral), std::move(h));
}

/// Abstract potentials "phi<a>" for every chart of the form's cover.
template <class S>
LCKData<S> lck_with_tags(ClosedOneForm<S> factors, LckMode mode = LckMode::lck) {
  std::vector<PotentialHandle<S>> h;
  for (std::size_t a = 0; a < factors.cover().size(); ++a)
    h.push_back({PotentialHandle<S>::Kind::abstract, "phi" + std::to_string(a), S{}});
  return LCKData<S>::make(std::move(factors), std::move(h), mode);
}

}  // namespace lcktk::models
