#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lcktk/complex.hpp"
#include "lcktk/covering.hpp"
#include "lcktk/errors.hpp"
#include "lcktk/exact.hpp"
#include "lcktk/group.hpp"

namespace lcktk {

/// Raised when two charts disagree by a non-constant amount on a component of their overlap.
class OverlapViolation : public PreconditionFailed {
 public:
  OverlapViolation(int a, int b, std::vector<VertexId> component, VertexId u, VertexId v, std::string du,
                   std::string dv)
      : PreconditionFailed(describe(a, b, component, u, v, du, dv)),
        chart_a(a),
        chart_b(b),
        component(std::move(component)),
        witness_u(u),
        witness_v(v),
        difference_u(std::move(du)),
        difference_v(std::move(dv)) {}

  int chart_a, chart_b;
  std::vector<VertexId> component;
  VertexId witness_u, witness_v;
  std::string difference_u, difference_v;

 private:
  static std::string describe(int a, int b, const std::vector<VertexId>& comp, VertexId u, VertexId v,
                              const std::string& du, const std::string& dv) {
    std::ostringstream os;
    os << "potentials of charts " << a << " and " << b << " do not differ by a constant on the overlap component {";
    for (std::size_t i = 0; i < comp.size(); ++i) os << (i ? "," : "") << comp[i];
    os << "}: f_" << a << " - f_" << b << " is " << du << " at vertex " << u << " but " << dv << " at vertex " << v;
    return os.str();
  }
};

template <class S>
struct GlobalFunction {
  ComplexPtr complex;
  std::vector<S> values;

  const S& operator()(VertexId v) const { return values.at(v); }
};

template <class S>
struct OverlapConstant {
  int chart_a = 0, chart_b = 0;  // chart_a < chart_b
  Subcomplex component;
  S value{};  // f_a - f_b on the component
};

/// Čech representative of a closed 1-form: a cover with per-chart vertex
/// potentials whose pairwise differences are constant on every connected
/// component of every overlap.
template <class S>
class ClosedOneForm {
 public:
  ClosedOneForm() = default;

  /// potentials[a] is aligned with cover[a].vertices(). Throws OverlapViolation.
  static ClosedOneForm make(Cover cover, std::vector<std::vector<S>> potentials);
  /// Same, from per-chart vertex maps (every chart vertex must be present).
  static ClosedOneForm make(Cover cover, const std::vector<std::map<VertexId, S>>& potentials);

  const Cover& cover() const { return cover_; }
  const ComplexPtr& complex() const { return cover_.parent(); }
  const std::vector<S>& potential(int chart) const { return potentials_.at(chart); }
  const std::vector<std::vector<S>>& potentials() const { return potentials_; }
  const S& value(int chart, VertexId v) const;
  const std::vector<OverlapConstant<S>>& overlap_constants() const { return constants_; }

  /// Per-chart index of the originating base chart (set by pullback_form).
  std::vector<int> base_chart;
  /// Non-fatal diagnostics, e.g. preimage charts cut by a truncation boundary.
  std::vector<std::string> warnings;

 private:
  Cover cover_;
  std::vector<std::vector<S>> potentials_;
  std::vector<OverlapConstant<S>> constants_;
};

/// Additive character on the generators of an edge-path group.
template <class S>
struct Character {
  GroupPtr group;
  std::vector<S> values;

  S evaluate(const Word& w) const {
    S sum{};
    for (Letter x : w) {
      if (x > 0) sum = sum + values.at(x - 1);
      else sum = sum - values.at(-x - 1);
    }
    return sum;
  }
  /// First relator (index) not sent to zero, if any.
  std::optional<int> failing_relator() const {
    const auto& rels = group->presentation().relators;
    for (std::size_t r = 0; r < rels.size(); ++r)
      if (!ScalarTraits<S>::is_zero(evaluate(rels[r]))) return static_cast<int>(r);
    return std::nullopt;
  }
  bool is_homomorphism() const { return !failing_relator(); }
  bool is_trivial() const {
    return std::all_of(values.begin(), values.end(), [](const S& v) { return ScalarTraits<S>::is_zero(v); });
  }
  /// Multiplicative view e^{value} (real scalars only).
  std::vector<double> exp_values() const {
    std::vector<double> out;
    for (const auto& v : values) out.push_back(std::exp(ScalarTraits<S>::real_value(v)));
    return out;
  }
};

template <class S>
struct ExactnessWitness {
  int generator = -1;
  EdgePath loop;
  S integral{};
};

template <class S>
struct ExactnessResult {
  std::optional<GlobalFunction<S>> primitive;
  std::optional<ExactnessWitness<S>> witness;
  explicit operator bool() const { return primitive.has_value(); }
};

struct HomotopyBudget {
  int max_depth = 3;
  std::size_t max_paths = 5000;
  std::size_t sample_size = 16;
};

template <class S>
struct HomotopyCertificate {
  S value{};
  std::size_t explored = 0;
  std::vector<EdgePath> sample;
  /// False when max_paths cut the search short.
  bool complete = true;
  bool consistent = true;
  std::optional<EdgePath> counterexample;
};

// ---------------------------------------------------------------------------
// Implementation

namespace detail {

template <class S>
std::vector<std::vector<S>> potentials_from_maps(const Cover& cover, const std::vector<std::map<VertexId, S>>& maps) {
  if (maps.size() != cover.size())
    throw InvalidInput("expected potentials for " + std::to_string(cover.size()) + " charts, got " +
                       std::to_string(maps.size()));
  std::vector<std::vector<S>> out(cover.size());
  for (std::size_t a = 0; a < cover.size(); ++a)
    for (auto v : cover[a].vertices()) {
      auto it = maps[a].find(v);
      if (it == maps[a].end())
        throw InvalidInput("chart " + std::to_string(a) + " has no potential value at vertex " + std::to_string(v));
      out[a].push_back(it->second);
    }
  return out;
}

}  // namespace detail

template <class S>
ClosedOneForm<S> ClosedOneForm<S>::make(Cover cover, std::vector<std::vector<S>> potentials) {
  if (potentials.size() != cover.size())
    throw InvalidInput("expected potentials for " + std::to_string(cover.size()) + " charts, got " +
                       std::to_string(potentials.size()));
  for (std::size_t a = 0; a < cover.size(); ++a)
    if (potentials[a].size() != cover[a].vertices().size())
      throw InvalidInput("chart " + std::to_string(a) + " has " + std::to_string(cover[a].vertices().size()) +
                         " vertices but " + std::to_string(potentials[a].size()) + " potential values");
  ClosedOneForm f;
  f.cover_ = std::move(cover);
  f.potentials_ = std::move(potentials);
  for (auto [a, b] : f.cover_.overlapping_pairs()) {
    auto overlap = f.cover_[a].intersect(f.cover_[b]);
    for (auto& comp : connected_components(overlap)) {
      const auto& vs = comp.vertices();
      S first = f.value(a, vs[0]) - f.value(b, vs[0]);
      for (std::size_t i = 1; i < vs.size(); ++i) {
        S d = f.value(a, vs[i]) - f.value(b, vs[i]);
        if (!ScalarTraits<S>::equal(d, first))
          throw OverlapViolation(a, b, vs, vs[0], vs[i], ScalarTraits<S>::str(first), ScalarTraits<S>::str(d));
      }
      f.constants_.push_back({a, b, std::move(comp), first});
    }
  }
  return f;
}

template <class S>
ClosedOneForm<S> ClosedOneForm<S>::make(Cover cover, const std::vector<std::map<VertexId, S>>& potentials) {
  auto p = detail::potentials_from_maps(cover, potentials);
  return make(std::move(cover), std::move(p));
}

template <class S>
const S& ClosedOneForm<S>::value(int chart, VertexId v) const {
  auto pos = cover_[chart].vertex_position(v);
  if (!pos) throw InvalidInput("vertex " + std::to_string(v) + " is not in chart " + std::to_string(chart));
  return potentials_[chart][*pos];
}

template <class S>
GlobalFunction<S> constant_function(const ComplexPtr& k, const S& c = S{}) {
  return {k, std::vector<S>(k->vertex_count(), c)};
}

template <class S>
ClosedOneForm<S> zero_form(const Cover& cover) {
  std::vector<std::vector<S>> p;
  for (const auto& ch : cover.charts()) p.emplace_back(ch.vertices().size(), S{});
  return ClosedOneForm<S>::make(cover, std::move(p));
}

/// Restriction of a global function to every chart of the cover.
template <class S>
std::vector<std::vector<S>> restrict_to_charts(const Cover& cover, const GlobalFunction<S>& f) {
  std::vector<std::vector<S>> p;
  for (const auto& ch : cover.charts()) {
    p.emplace_back();
    for (auto v : ch.vertices()) p.back().push_back(f(v));
  }
  return p;
}

template <class S>
ClosedOneForm<S> differential(const GlobalFunction<S>& f) {
  if (static_cast<int>(f.values.size()) != f.complex->vertex_count())
    throw InvalidInput("function must have one value per vertex");
  return ClosedOneForm<S>::make(Cover::single_chart(f.complex), std::vector<std::vector<S>>{f.values});
}

/// Adds the chart restrictions of f to the potentials (the form θ + df, same cover).
template <class S>
ClosedOneForm<S> add_differential(const ClosedOneForm<S>& theta, const GlobalFunction<S>& f) {
  if (!same_complex(theta.complex(), f.complex)) throw InvalidInput("function lives on another complex");
  auto p = theta.potentials();
  auto r = restrict_to_charts(theta.cover(), f);
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t i = 0; i < p[a].size(); ++i) p[a][i] = p[a][i] + r[a][i];
  auto out = ClosedOneForm<S>::make(theta.cover(), std::move(p));
  out.base_chart = theta.base_chart;
  out.warnings = theta.warnings;
  return out;
}

template <class S>
ClosedOneForm<S> negate(const ClosedOneForm<S>& theta) {
  auto p = theta.potentials();
  for (auto& ch : p)
    for (auto& x : ch) x = -x;
  auto out = ClosedOneForm<S>::make(theta.cover(), std::move(p));
  out.base_chart = theta.base_chart;
  out.warnings = theta.warnings;
  return out;
}

/// Union of both chart families, as one form; throws OverlapViolation on a cross mismatch.
template <class S>
ClosedOneForm<S> union_form(const ClosedOneForm<S>& a, const ClosedOneForm<S>& b) {
  if (!same_complex(a.complex(), b.complex())) throw InvalidInput("forms live on different complexes");
  auto charts = a.cover().charts();
  charts.insert(charts.end(), b.cover().charts().begin(), b.cover().charts().end());
  auto p = a.potentials();
  p.insert(p.end(), b.potentials().begin(), b.potentials().end());
  return ClosedOneForm<S>::make(Cover(a.complex(), std::move(charts)), std::move(p));
}

/// The cross-overlap mismatch proving a and b inequivalent, if any.
template <class S>
std::optional<OverlapViolation> equivalence_witness(const ClosedOneForm<S>& a, const ClosedOneForm<S>& b) {
  try {
    union_form(a, b);
  } catch (const OverlapViolation& v) {
    return v;
  }
  return std::nullopt;
}

template <class S>
bool equivalent(const ClosedOneForm<S>& a, const ClosedOneForm<S>& b) {
  return !equivalence_witness(a, b).has_value();
}

/// Chooses the chart used for an edge among the (ascending, nonempty) candidates.
using ChartChooser = std::function<int(int edge, const std::vector<int>& candidates)>;

template <class S>
S integrate_with(const ClosedOneForm<S>& theta, const EdgePath& path, const ChartChooser& choose) {
  const auto& K = *theta.complex();
  validate_path(K, path);
  S sum{};
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    VertexId u = path.vertices[i], v = path.vertices[i + 1];
    int e = *K.edge_index(u, v);
    const auto& cands = theta.cover().charts_of_edge(e);
    if (cands.empty())
      throw InvalidInput("edge {" + std::to_string(std::min(u, v)) + "," + std::to_string(std::max(u, v)) +
                         "} lies in no chart");
    int a = choose(e, cands);
    sum = sum + (theta.value(a, v) - theta.value(a, u));
  }
  return sum;
}

/// Integral along the path, using the lowest-index chart containing each edge.
template <class S>
S integrate(const ClosedOneForm<S>& theta, const EdgePath& path) {
  return integrate_with(theta, path, [](int, const std::vector<int>& c) { return c.front(); });
}

template <class S>
bool endpoints_criterion_check(const ClosedOneForm<S>& theta, const EdgePath& a, const EdgePath& b) {
  if (a.start() != b.start() || a.end() != b.end()) throw InvalidInput("paths must share their endpoints");
  return ScalarTraits<S>::equal(integrate(theta, a), integrate(theta, b));
}

/// Integral plus a breadth-first certificate over elementary homotopy moves.
/// The sample is drawn with a seeded reservoir; traversal order is deterministic.
template <class S>
HomotopyCertificate<S> homotopy_invariant_integrate(const ClosedOneForm<S>& theta, const EdgePath& path,
                                                     const HomotopyBudget& budget = {}, std::uint64_t seed = 0) {
  HomotopyCertificate<S> cert;
  cert.value = integrate(theta, path);
  std::mt19937_64 rng(seed);
  std::set<EdgePath> seen{path};
  std::vector<EdgePath> frontier{path};
  cert.sample.push_back(path);
  cert.explored = 1;
  for (int depth = 0; depth < budget.max_depth && !frontier.empty(); ++depth) {
    std::vector<EdgePath> next;
    for (const auto& p : frontier) {
      for (auto& q : elementary_homotopy_moves(p, *theta.complex())) {
        if (seen.count(q)) continue;
        if (seen.size() >= budget.max_paths) {
          cert.complete = false;
          return cert;
        }
        seen.insert(q);
        ++cert.explored;
        if (!ScalarTraits<S>::equal(integrate(theta, q), cert.value) && cert.consistent) {
          cert.consistent = false;
          cert.counterexample = q;
        }
        if (cert.sample.size() < budget.sample_size) {
          cert.sample.push_back(q);
        } else {
          std::uniform_int_distribution<std::size_t> pick(0, cert.explored - 1);
          std::size_t j = pick(rng);
          if (j < budget.sample_size) cert.sample[j] = q;
        }
        next.push_back(std::move(q));
      }
    }
    frontier = std::move(next);
  }
  return cert;
}

namespace detail {

// Integral of θ from the basepoint along tree paths.
template <class S>
std::vector<S> tree_potential(const ClosedOneForm<S>& theta, const PresentedGroup& g) {
  const auto& K = *theta.complex();
  std::vector<S> f(K.vertex_count());
  std::vector<VertexId> order;
  std::vector<char> done(K.vertex_count(), 0);
  // Parents precede children in breadth-first order from the basepoint.
  order.push_back(g.basepoint());
  done[g.basepoint()] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto w : K.neighbors(order[i]))
      if (!done[w] && g.tree_parent(w) == order[i]) {
        done[w] = 1;
        order.push_back(w);
      }
  for (std::size_t i = 1; i < order.size(); ++i) {
    VertexId v = order[i], p = g.tree_parent(v);
    f[v] = f[p] + integrate(theta, EdgePath{{p, v}});
  }
  return f;
}

template <class S>
S generator_value(const ClosedOneForm<S>& theta, const PresentedGroup& g, const std::vector<S>& f, int gen) {
  const auto& e = theta.complex()->edges()[g.generator_edge(gen)];
  return f[e.a] + integrate(theta, EdgePath{{e.a, e.b}}) - f[e.b];
}

}  // namespace detail

template <class S>
Character<S> monodromy_character(const ClosedOneForm<S>& theta, VertexId basepoint = 0) {
  auto g = edge_path_group(theta.complex(), basepoint);
  auto f = detail::tree_potential(theta, *g);
  Character<S> chi{g, {}};
  for (int i = 0; i < g->generator_count(); ++i) chi.values.push_back(detail::generator_value(theta, *g, f, i));
  return chi;
}

template <class S>
ExactnessResult<S> is_exact(const ClosedOneForm<S>& theta, VertexId basepoint = 0) {
  auto g = edge_path_group(theta.complex(), basepoint);
  auto f = detail::tree_potential(theta, *g);
  ExactnessResult<S> res;
  for (int i = 0; i < g->generator_count(); ++i) {
    S v = detail::generator_value(theta, *g, f, i);
    if (!ScalarTraits<S>::is_zero(v)) {
      res.witness = ExactnessWitness<S>{i, g->generator_loop(i), v};
      return res;
    }
  }
  res.primitive = GlobalFunction<S>{theta.complex(), std::move(f)};
  return res;
}

/// Checks that f - f_α is constant on each connected component of each chart.
template <class S>
std::optional<std::string> primitive_local_defect(const ClosedOneForm<S>& theta, const GlobalFunction<S>& f) {
  for (std::size_t a = 0; a < theta.cover().size(); ++a)
    for (const auto& comp : connected_components(theta.cover()[a])) {
      const auto& vs = comp.vertices();
      S c0 = f(vs[0]) - theta.value(static_cast<int>(a), vs[0]);
      for (auto v : vs)
        if (!ScalarTraits<S>::equal(f(v) - theta.value(static_cast<int>(a), v), c0))
          return "f - f_" + std::to_string(a) + " is not constant: vertices " + std::to_string(vs[0]) + " and " +
                 std::to_string(v);
    }
  return std::nullopt;
}

/// Primitive with f(basepoint) = 0. Throws PreconditionFailed citing a
/// generator when bounded coset enumeration does not prove the group trivial.
template <class S>
GlobalFunction<S> primitive_on_simply_connected(const ClosedOneForm<S>& theta, VertexId basepoint = 0,
                                                const EnumerationLimits& limits = {}) {
  auto g = edge_path_group(theta.complex(), basepoint);
  if (!is_trivial_group(*g, limits)) {
    int gen = nontrivial_generator(*g, limits);
    const auto& e = theta.complex()->edges()[g->generator_edge(gen)];
    throw PreconditionFailed("complex is not simply connected: generator " + std::to_string(gen) + " (edge {" +
                             std::to_string(e.a) + "," + std::to_string(e.b) + "}, loop " +
                             to_string(g->generator_loop(gen)) + ") is not proved trivial");
  }
  auto res = is_exact(theta, basepoint);
  if (!res) throw Error("closed form has a nonzero loop integral on a simply connected complex");
  if (auto defect = primitive_local_defect(theta, *res.primitive)) throw Error(*defect);
  return *res.primitive;
}

template <class S>
GlobalFunction<S> pull_function(const CoveringMap& pi, const GlobalFunction<S>& f) {
  if (!same_complex(f.complex, pi.base())) throw InvalidInput("function does not live on the covering's base");
  GlobalFunction<S> out{pi.total(), {}};
  for (VertexId x = 0; x < pi.total()->vertex_count(); ++x) out.values.push_back(f(pi.project(x)));
  return out;
}

/// True when every chart edge at π(x) lifts to an edge at x inside the component.
inline bool preimage_component_complete(const CoveringMap& pi, const Subcomplex& base_chart, const Subcomplex& comp) {
  const auto& B = *pi.base();
  const auto& T = *pi.total();
  for (auto x : comp.vertices()) {
    int need = 0, have = 0;
    for (int e : B.incident_edges(pi.project(x))) need += base_chart.contains_edge(e);
    for (int e : T.incident_edges(x)) have += comp.contains_edge(e);
    if (have != need) return false;
  }
  return true;
}

/// Charts are the connected components of preimages of base charts; potentials composed with the projection.
template <class S>
ClosedOneForm<S> pullback_form(const CoveringMap& pi, const ClosedOneForm<S>& theta) {
  if (!same_complex(theta.complex(), pi.base())) throw InvalidInput("form does not live on the covering's base");
  std::vector<Subcomplex> charts;
  std::vector<std::vector<S>> pots;
  std::vector<int> provenance;
  std::vector<std::string> warnings;
  for (std::size_t a = 0; a < theta.cover().size(); ++a) {
    const auto& chart = theta.cover()[a];
    auto comps = connected_components(pi.preimage(chart));
    std::vector<int> cut;
    for (auto& comp : comps) {
      if (pi.truncated() && !preimage_component_complete(pi, chart, comp)) cut.push_back(static_cast<int>(charts.size()));
      std::vector<S> p;
      for (auto x : comp.vertices()) p.push_back(theta.value(static_cast<int>(a), pi.project(x)));
      charts.push_back(std::move(comp));
      pots.push_back(std::move(p));
      provenance.push_back(static_cast<int>(a));
    }
    if (!cut.empty()) {
      std::ostringstream os;
      os << "base chart " << a << ": " << cut.size() << " preimage chart(s) cut by the truncation boundary (charts";
      for (int c : cut) os << " " << c;
      os << ")";
      warnings.push_back(os.str());
    }
  }
  auto out = ClosedOneForm<S>::make(Cover(pi.total(), std::move(charts)), std::move(pots));
  out.base_chart = std::move(provenance);
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace lcktk
