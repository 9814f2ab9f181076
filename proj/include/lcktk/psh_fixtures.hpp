#pragma once

#include "lcktk/psh.hpp"

namespace lcktk::psh {

/// |z|² (plus a constant) in dimension 1.
FieldPtr norm_squared(double constant = 0.0);

/// g(z) = z², four target boxes of half-width 0.9 centred at radius 1.05 on the
/// axes, two preimage components per box (eight source charts), ψ_α = |w|² +
/// Re(a_α w), φ = |z|² + 1 and radial cut-offs (0.6, 0.85) at the box centres.
/// Source grid [-1.5625, 1.5625]² with spacing h (h = 1/128 by default).
WellRelatedSpec square_map_spec(double h = 1.0 / 128);

/// The same configuration with φ of source chart 0 replaced by Re(z²) + 3,
/// which is positive but not strongly psh.
WellRelatedSpec square_map_corrupted_spec(double h = 1.0 / 128);

/// g(z) = z with U = V = [-1, 1]², ψ = φ = |z|² + 1 and a cut-off (0.3, 0.9) at 0.
WellRelatedSpec identity_spec(double h = 1.0 / 16);

/// Single chart: g(z) = z², ψ = |w|², φ = |z|², cut-off (0.5, 2.0) at 0. Used
/// for Levi constants on annuli; φ vanishes at 0, so the spec is not validated.
WellRelatedSpec levi_example_spec(double h = 1.0 / 64);

/// z ↦ z^k.
MapPtr power_map(int k);

}  // namespace lcktk::psh
