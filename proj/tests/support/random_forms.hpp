#pragma once

#include <cstdint>
#include <map>
#include <random>

#include "lcktk/cech.hpp"

namespace lcktk::testing {

/// Connected random 2-complex: random spanning tree, extra edges, and a random
/// subset of the 3-cliques as triangles.
ComplexPtr random_complex(int n, double extra_edge_p, double triangle_p, std::mt19937_64& rng);

/// Closed edge cochain: value on the oriented edge a->b (a < b); reversed edges negate.
struct EdgeCochain {
  ComplexPtr complex;
  std::map<std::pair<VertexId, VertexId>, Exact> on_edge;

  Exact operator()(VertexId u, VertexId v) const;
  Exact along(const EdgePath& p) const;
  bool is_closed() const;
};

Rational random_rational(std::mt19937_64& rng, int num = 6, int den = 4);

/// Random closed cochain: a random solution of the abelianized relations on
/// non-tree edges plus the coboundary of a random vertex function.
EdgeCochain random_closed_cochain(const ComplexPtr& k, std::mt19937_64& rng);

/// Star cover plus a few random extra triangle and edge charts.
Cover random_cover(const ComplexPtr& k, std::mt19937_64& rng);

/// Local primitives of the cochain on each chart component, shifted by random constants.
ClosedOneForm<Exact> form_from_cochain(const Cover& cover, const EdgeCochain& w, std::mt19937_64& rng);

/// Equivalent form obtained by splitting every chart into closed triangles,
/// free edges and isolated vertices, each with its own random constant.
ClosedOneForm<Exact> subdivide(const ClosedOneForm<Exact>& theta, std::mt19937_64& rng);

/// Basis of the rational nullspace of an integer matrix with `cols` columns.
std::vector<std::vector<Rational>> rational_nullspace(const std::vector<std::vector<long long>>& m, int cols);

}  // namespace lcktk::testing
