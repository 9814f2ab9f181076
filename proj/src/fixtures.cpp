#include "lcktk/fixtures.hpp"

#include <random>

#include "lcktk/errors.hpp"

namespace lcktk::fixtures {

ComplexPtr cycle(int n) {
  if (n < 3) throw InvalidInput("cycle needs at least 3 vertices");
  std::vector<std::array<VertexId, 2>> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return SimplicialComplex::build(n, edges, {});
}

ComplexPtr icosahedron() {
  std::vector<std::array<VertexId, 3>> tris;
  for (int i = 0; i < 5; ++i) {
    int j = (i + 1) % 5;
    tris.push_back({0, 1 + i, 1 + j});
    tris.push_back({11, 6 + i, 6 + j});
    tris.push_back({1 + i, 1 + j, 6 + i});
    tris.push_back({1 + j, 6 + i, 6 + j});
  }
  return SimplicialComplex::build(12, {}, tris);
}

ComplexPtr projective_plane() {
  return SimplicialComplex::build(6, {},
                                  {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                                   {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}});
}

ComplexPtr torus() {
  std::vector<std::array<VertexId, 3>> tris;
  for (int i = 0; i < 7; ++i) {
    tris.push_back({i, (i + 1) % 7, (i + 3) % 7});
    tris.push_back({i, (i + 2) % 7, (i + 3) % 7});
  }
  return SimplicialComplex::build(7, {}, tris);
}

ComplexPtr random_cone(int n, double edge_probability, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_probability);
  std::vector<std::array<VertexId, 2>> edges;
  std::vector<std::array<VertexId, 3>> tris;
  for (int u = 0; u < n; ++u) {
    edges.push_back({u, n});
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) tris.push_back({u, v, n});
  }
  return SimplicialComplex::build(n + 1, edges, tris);
}

}  // namespace lcktk::fixtures
