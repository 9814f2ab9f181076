#pragma once

#include <cstdint>

#include "lcktk/complex.hpp"

namespace lcktk::fixtures {

/// Cycle graph on n >= 3 vertices (no triangles).
ComplexPtr cycle(int n);
/// Boundary of the icosahedron (a 2-sphere, 12 vertices).
ComplexPtr icosahedron();
/// Six-vertex real projective plane.
ComplexPtr projective_plane();
/// Seven-vertex torus.
ComplexPtr torus();
/// Cone over an Erdős–Rényi graph on n vertices; the apex is vertex n.
ComplexPtr random_cone(int n, double edge_probability, std::uint64_t seed);

}  // namespace lcktk::fixtures
