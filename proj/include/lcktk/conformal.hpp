#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcktk/cech.hpp"
#include "lcktk/covering.hpp"

namespace lcktk {

enum class LckMode { lck, lcpk };

/// Local Kähler potential: `e^{log_scale}` times the function named by `ref`
/// (an opaque tag, or a grid reference "file#id" resolved by psh_numeric).
template <class S>
struct PotentialHandle {
  enum class Kind { abstract, grid };
  Kind kind = Kind::abstract;
  std::string ref;
  S log_scale{};

  friend bool operator==(const PotentialHandle& a, const PotentialHandle& b) {
    return a.kind == b.kind && a.ref == b.ref && ScalarTraits<S>::equal(a.log_scale, b.log_scale);
  }
};

/// Charts U_α with potentials φ_α and conformal factors f_α such that
/// e^{f_α} i∂∂̄φ_α agree on overlaps. The factors form the Lee form.
template <class S>
struct LCKData {
  ClosedOneForm<S> factors;
  std::vector<PotentialHandle<S>> potentials;
  LckMode mode = LckMode::lck;
  /// Set when derived from a truncated covering.
  bool partial = false;
  std::vector<std::string> warnings;

  const Cover& cover() const { return factors.cover(); }
  const ComplexPtr& complex() const { return factors.complex(); }

  static LCKData make(ClosedOneForm<S> factors, std::vector<PotentialHandle<S>> potentials,
                      LckMode mode = LckMode::lck) {
    if (potentials.size() != factors.cover().size())
      throw InvalidInput("expected " + std::to_string(factors.cover().size()) + " potential handles, got " +
                         std::to_string(potentials.size()));
    LCKData d;
    d.factors = std::move(factors);
    d.potentials = std::move(potentials);
    d.mode = mode;
    return d;
  }
};

/// Kähler potentials ψ_C on the charts of a covering's total complex.
template <class S>
struct KahlerData {
  CoveringMap covering;
  /// Chart system on the base that the charts lie over.
  Cover base_cover;
  /// Charts on the total complex and the base chart each one lies over.
  Cover cover;
  std::vector<int> base_chart;
  std::vector<PotentialHandle<S>> potentials;
  LckMode mode = LckMode::lck;
  bool partial = false;
  std::vector<std::string> warnings;
};

template <class S>
struct LiftResult {
  KahlerData<S> kahler;
  Character<S> character;
  /// Primitive of the pulled-back Lee form (zero at the basepoint lift).
  GlobalFunction<S> primitive;
};

/// Log-transitions of a flat positive line bundle: s_a = e^{log_t} s_b on the component.
template <class S>
struct LineBundleData {
  struct Transition {
    int chart_a = 0, chart_b = 0;
    Subcomplex component;
    S log_t{};
  };
  Cover cover;
  std::vector<Transition> transitions;
  /// Base chart of each chart when pulled back along a covering.
  std::vector<int> base_chart;

  /// Log-transition from chart b to chart a at vertex x (both charts contain x).
  S log_transition(int a, int b, VertexId x) const;
};

/// Flat section: one log value per chart (the section is constant in each trivialization).
template <class S>
struct Section {
  Cover cover;
  std::vector<S> log_values;
  std::vector<double> values() const {
    std::vector<double> out;
    for (const auto& v : log_values) out.push_back(std::exp(ScalarTraits<S>::real_value(v)));
    return out;
  }
};

/// A closed walk in the chart-adjacency graph with nonzero log-holonomy.
template <class S>
struct HolonomyWitness {
  std::vector<int> charts;  // first == last
  std::vector<VertexId> through;  // a vertex of each overlap component crossed
  S holonomy{};
};

template <class S>
struct SectionResult {
  std::optional<Section<S>> section;
  std::optional<HolonomyWitness<S>> obstruction;
};

class HolonomyError : public PreconditionFailed {
 public:
  HolonomyError(std::string msg, std::vector<int> charts, std::string holonomy)
      : PreconditionFailed(std::move(msg)), charts(std::move(charts)), holonomy(std::move(holonomy)) {}
  std::vector<int> charts;
  std::string holonomy;
};

class HomothetyError : public PreconditionFailed {
 public:
  HomothetyError(std::string msg, Word element, int chart, VertexId vertex)
      : PreconditionFailed(std::move(msg)), element(std::move(element)), chart(chart), vertex(vertex) {}
  Word element;
  int chart;
  VertexId vertex;
};

// ---------------------------------------------------------------------------

template <class S>
ClosedOneForm<S> lee_form(const LCKData<S>& lck) {
  return lck.factors;
}

/// (X, e^f ω, θ + df): factors become f|_{U_α} + f_α.
template <class S>
LCKData<S> conformal_rescale(const LCKData<S>& lck, const GlobalFunction<S>& f) {
  LCKData<S> out = lck;
  out.factors = add_differential(lck.factors, f);
  return out;
}

/// A function f with lee form = df (then e^{-f}ω is Kähler), or the witness generator.
template <class S>
ExactnessResult<S> is_gck(const LCKData<S>& lck, VertexId basepoint = 0) {
  return is_exact(lck.factors, basepoint);
}

/// Function u with b = conformal_rescale(a, u), when the potentials agree up to
/// their log scales; empty otherwise.
template <class S>
std::optional<GlobalFunction<S>> equivalent_up_to_rescale(const LCKData<S>& a, const LCKData<S>& b) {
  if (!same_complex(a.complex(), b.complex()) || a.cover().size() != b.cover().size()) return std::nullopt;
  const auto& K = *a.complex();
  std::vector<std::optional<S>> u(K.vertex_count());
  for (std::size_t c = 0; c < a.cover().size(); ++c) {
    if (!(a.cover()[c] == b.cover()[c])) return std::nullopt;
    const auto& ha = a.potentials[c];
    const auto& hb = b.potentials[c];
    if (ha.kind != hb.kind || ha.ref != hb.ref) return std::nullopt;
    for (auto v : a.cover()[c].vertices()) {
      S d = (b.factors.value(static_cast<int>(c), v) + hb.log_scale) -
            (a.factors.value(static_cast<int>(c), v) + ha.log_scale);
      if (!u[v]) u[v] = d;
      else if (!ScalarTraits<S>::equal(*u[v], d)) return std::nullopt;
    }
  }
  GlobalFunction<S> out{a.complex(), {}};
  for (auto& x : u) out.values.push_back(x.value_or(S{}));
  return out;
}

template <class S>
LCKData<S> pullback_lck(const CoveringMap& pi, const LCKData<S>& lck) {
  LCKData<S> out;
  out.factors = pullback_form(pi, lck.factors);
  for (int a : out.factors.base_chart) out.potentials.push_back(lck.potentials[a]);
  out.mode = lck.mode;
  out.partial = pi.truncated();
  out.warnings = out.factors.warnings;
  return out;
}

/// Forward direction: pulls back to the universal cover, rescales by the
/// primitive F of the pulled-back Lee form, and reads the homothety
/// character η ↦ F(η·x̃₀) − F(x̃₀). Each lifted chart C over α gets potential
/// e^{ℓ_α + f_C − F}·φ_α, so η maps the potential on C to e^{−χ(η)} times
/// the potential on η·C.
template <class S>
LiftResult<S> lift_to_kahler(const LCKData<S>& lck, const CoveringMap& pi) {
  if (!pi.universal()) throw PreconditionFailed("lift_to_kahler needs the universal covering");
  auto total_group = edge_path_group(pi.total(), pi.basepoint_lift());
  if (!is_trivial_group(*total_group)) {
    int g = nontrivial_generator(*total_group);
    throw PreconditionFailed("total complex is not simply connected: loop " + to_string(total_group->generator_loop(g)));
  }
  auto up = pullback_lck(pi, lck);
  auto F = primitive_on_simply_connected(up.factors, pi.basepoint_lift());

  LiftResult<S> res;
  auto& K = res.kahler;
  K.covering = pi;
  K.base_cover = lck.cover();
  K.cover = up.cover();
  K.base_chart = up.factors.base_chart;
  K.mode = lck.mode;
  K.partial = pi.truncated();
  K.warnings = up.warnings;
  for (std::size_t c = 0; c < K.cover.size(); ++c) {
    VertexId x = K.cover[c].vertices().front();
    auto h = up.potentials[c];
    h.log_scale = h.log_scale + (up.factors.value(static_cast<int>(c), x) - F(x));
    K.potentials.push_back(std::move(h));
  }

  auto base_char = monodromy_character(lck.factors, pi.group()->basepoint());
  res.character = Character<S>{pi.group(), {}};
  VertexId x0 = pi.basepoint_lift();
  for (int g = 0; g < pi.group()->generator_count(); ++g) {
    try {
      VertexId gx = pi.deck_vertex({g + 1}, x0);
      S v = F(gx) - F(x0);
      if (!ScalarTraits<S>::equal(v, base_char.values[g]))
        throw Error("homothety character disagrees with the Lee-form monodromy at generator " + std::to_string(g));
      res.character.values.push_back(v);
    } catch (const TruncationError&) {
      res.character.values.push_back(base_char.values[g]);
      K.warnings.push_back("generator " + std::to_string(g) +
                           " leaves the materialized region; its character value is the base loop integral");
    }
  }
  res.primitive = std::move(F);
  return res;
}

namespace detail {

inline int chart_with_vertices(const std::map<std::vector<VertexId>, int>& index, std::vector<VertexId> vs) {
  std::sort(vs.begin(), vs.end());
  auto it = index.find(vs);
  return it == index.end() ? -1 : it->second;
}

}  // namespace detail

struct HomothetyReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;  // images outside the materialized region
};

/// Verifies log_scale(η·C) − log_scale(C) = −χ(η) with matching references,
/// for every chart C and every word η given (defaults to the generators).
/// Throws HomothetyError with the first failing (η, chart, vertex).
template <class S>
HomothetyReport check_homothety(const KahlerData<S>& kd, const Character<S>& chi, std::vector<Word> words = {}) {
  if (words.empty())
    for (int g = 0; g < chi.group->generator_count(); ++g) words.push_back({g + 1});
  std::map<std::vector<VertexId>, int> index;
  for (std::size_t c = 0; c < kd.cover.size(); ++c) index[kd.cover[c].vertices()] = static_cast<int>(c);
  HomothetyReport rep;
  for (const auto& w : words) {
    S expected = -chi.evaluate(w);
    for (std::size_t c = 0; c < kd.cover.size(); ++c) {
      std::vector<VertexId> img;
      try {
        for (auto x : kd.cover[c].vertices()) img.push_back(kd.covering.deck_vertex(w, x));
      } catch (const TruncationError&) {
        ++rep.skipped;
        continue;
      }
      int d = detail::chart_with_vertices(index, img);
      VertexId x = kd.cover[c].vertices().front();
      if (d < 0) {
        ++rep.skipped;
        continue;
      }
      const auto& hc = kd.potentials[c];
      const auto& hd = kd.potentials[d];
      if (hc.ref != hd.ref || hc.kind != hd.kind)
        throw HomothetyError("deck element " + to_string(w) + " maps chart " + std::to_string(c) + " (potential '" +
                                 hc.ref + "') to chart " + std::to_string(d) + " with potential '" + hd.ref + "'",
                             w, static_cast<int>(c), x);
      S got = hd.log_scale - hc.log_scale;
      if (!ScalarTraits<S>::equal(got, expected))
        throw HomothetyError("deck element " + to_string(w) + " scales the potential of chart " + std::to_string(c) +
                                 " at vertex " + std::to_string(x) + " by e^(" + ScalarTraits<S>::str(got) +
                                 "), expected e^(" + ScalarTraits<S>::str(expected) + ")",
                             w, static_cast<int>(c), x);
      ++rep.checked;
    }
  }
  return rep;
}

template <class S>
S LineBundleData<S>::log_transition(int a, int b, VertexId x) const {
  if (a == b) return S{};
  bool swap = a > b;
  int lo = swap ? b : a, hi = swap ? a : b;
  for (const auto& t : transitions)
    if (t.chart_a == lo && t.chart_b == hi && t.component.contains_vertex(x)) return swap ? -t.log_t : t.log_t;
  throw InvalidInput("charts " + std::to_string(a) + " and " + std::to_string(b) + " do not overlap at vertex " +
                     std::to_string(x));
}

/// Checks t_ab + t_bc + t_ca = 0 at every vertex shared by three charts; returns the first failing triple.
template <class S>
std::optional<std::array<int, 4>> cocycle_defect(const LineBundleData<S>& L) {
  const auto& K = *L.cover.parent();
  for (VertexId x = 0; x < K.vertex_count(); ++x) {
    const auto& cs = L.cover.charts_of_vertex(x);
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        for (std::size_t k = j + 1; k < cs.size(); ++k) {
          S s = L.log_transition(cs[i], cs[j], x) + L.log_transition(cs[j], cs[k], x) +
                L.log_transition(cs[k], cs[i], x);
          if (!ScalarTraits<S>::is_zero(s)) return std::array<int, 4>{cs[i], cs[j], cs[k], x};
        }
  }
  return std::nullopt;
}

/// Weight bundle of χ on the star cover of the base: for the overlap
/// component of star(v) ∩ star(w) through x, log t_vw = χ(loop b→w→x→v→b)
/// along tree paths. Flat sections upstairs then satisfy s(η·C) = e^{χ(η)} s(C).
template <class S>
LineBundleData<S> weight_bundle(const Character<S>& chi) {
  if (auto r = chi.failing_relator())
    throw PreconditionFailed("character is not a homomorphism: relator " + std::to_string(*r) + " (" +
                             to_string(chi.group->presentation().relators[*r]) + ") evaluates to " +
                             ScalarTraits<S>::str(chi.evaluate(chi.group->presentation().relators[*r])));
  const auto& g = *chi.group;
  const auto& K = g.complex();
  LineBundleData<S> L;
  L.cover = star_cover(K);
  for (auto [v, w] : L.cover.overlapping_pairs())
    for (auto& comp : connected_components(L.cover[v].intersect(L.cover[w]))) {
      VertexId x = comp.vertices().front();
      EdgePath loop = g.tree_path(w);
      if (x != w) loop = loop.then(EdgePath{{w, x}});
      if (x != v) loop = loop.then(EdgePath{{x, v}});
      loop = loop.then(g.tree_path(v).reversed());
      S t = chi.evaluate(g.path_word(loop));
      L.transitions.push_back({v, w, std::move(comp), std::move(t)});
    }
  return L;
}

/// Bundle on the total complex: charts are components of chart preimages,
/// transitions copied from the base components they lie over.
template <class S>
LineBundleData<S> pullback_bundle(const CoveringMap& pi, const LineBundleData<S>& L) {
  if (!same_complex(L.cover.parent(), pi.base())) throw InvalidInput("bundle does not live on the covering's base");
  LineBundleData<S> up;
  std::vector<Subcomplex> charts;
  for (std::size_t a = 0; a < L.cover.size(); ++a)
    for (auto& comp : connected_components(pi.preimage(L.cover[a]))) {
      charts.push_back(std::move(comp));
      up.base_chart.push_back(static_cast<int>(a));
    }
  up.cover = Cover(pi.total(), std::move(charts));
  for (auto [c, d] : up.cover.overlapping_pairs())
    for (auto& comp : connected_components(up.cover[c].intersect(up.cover[d]))) {
      VertexId x = comp.vertices().front();
      S t = L.log_transition(up.base_chart[c], up.base_chart[d], pi.project(x));
      up.transitions.push_back({c, d, std::move(comp), std::move(t)});
    }
  return up;
}

/// Flat section by spanning-tree propagation on the chart-adjacency graph
/// (chart 0 normalized to log value 0); reports a holonomy cycle on failure.
template <class S>
SectionResult<S> try_trivializing_section(const LineBundleData<S>& L) {
  std::size_t n = L.cover.size();
  std::vector<std::vector<int>> adj(n);  // transition indices
  for (std::size_t i = 0; i < L.transitions.size(); ++i) {
    adj[L.transitions[i].chart_a].push_back(static_cast<int>(i));
    adj[L.transitions[i].chart_b].push_back(static_cast<int>(i));
  }
  std::vector<std::optional<S>> sigma(n);
  std::vector<int> parent(n, -1), via(n, -1);
  std::vector<char> tree_edge(L.transitions.size(), 0);
  SectionResult<S> res;
  for (std::size_t root = 0; root < n; ++root) {
    if (sigma[root]) continue;
    sigma[root] = S{};
    std::vector<int> queue{static_cast<int>(root)};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      int a = queue[q];
      for (int ti : adj[a]) {
        const auto& t = L.transitions[ti];
        int b = t.chart_a == a ? t.chart_b : t.chart_a;
        if (sigma[b]) continue;
        // s_a = e^{t_ab} s_b, so σ_b = σ_a − t_ab.
        S t_ab = t.chart_a == a ? t.log_t : -t.log_t;
        sigma[b] = *sigma[a] - t_ab;
        parent[b] = a;
        via[b] = ti;
        tree_edge[ti] = 1;
        queue.push_back(b);
      }
    }
  }
  for (std::size_t ti = 0; ti < L.transitions.size(); ++ti) {
    if (tree_edge[ti]) continue;
    const auto& t = L.transitions[ti];
    S defect = *sigma[t.chart_a] - t.log_t - *sigma[t.chart_b];
    if (ScalarTraits<S>::is_zero(defect)) continue;
    HolonomyWitness<S> w;
    auto path_to_root = [&](int c) {
      std::vector<int> p{c};
      while (parent[p.back()] >= 0) p.push_back(parent[p.back()]);
      return p;
    };
    auto pa = path_to_root(t.chart_a), pb = path_to_root(t.chart_b);
    while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
      pa.pop_back();
      pb.pop_back();
    }
    // Cycle: chart_a → (tree) → common ancestor → (tree) → chart_b → chart_a.
    w.charts = pa;
    for (auto it = pb.rbegin() + 1; it != pb.rend(); ++it) w.charts.push_back(*it);
    w.charts.push_back(t.chart_a);
    w.through.push_back(t.component.vertices().front());
    w.holonomy = defect;
    res.obstruction = std::move(w);
    return res;
  }
  Section<S> s{L.cover, {}};
  for (auto& x : sigma) s.log_values.push_back(*x);
  res.section = std::move(s);
  return res;
}

template <class S>
Section<S> trivializing_section(const LineBundleData<S>& L) {
  auto r = try_trivializing_section(L);
  if (r.section) return *r.section;
  std::string cyc;
  for (int c : r.obstruction->charts) cyc += (cyc.empty() ? "" : "->") + std::to_string(c);
  throw HolonomyError("transitions are not a coboundary: chart cycle " + cyc + " has log-holonomy " +
                          ScalarTraits<S>::str(r.obstruction->holonomy),
                      r.obstruction->charts, ScalarTraits<S>::str(r.obstruction->holonomy));
}

template <class S>
Character<S> negate(const Character<S>& chi) {
  Character<S> out{chi.group, {}};
  for (const auto& v : chi.values) out.values.push_back(-v);
  return out;
}

template <class S>
struct DescendResult {
  LCKData<S> lck;
  HomothetyReport homothety;
  /// f̃ = −log ṽ on the total complex; f̃(η·x) = f̃(x) + χ(η).
  GlobalFunction<S> weight;
};

/// Converse direction: with ṽ a flat section of the weight bundle of −χ
/// pulled back to the cover, e^{f̃}ω̃ (f̃ = −log ṽ) is deck invariant and
/// descends. Each base chart α is read off one lift C_α; its factor is
/// f̃ + log_scale(C_α) and its potential handle has log scale 0.
template <class S>
DescendResult<S> descend_to_lck(const KahlerData<S>& kd, const Character<S>& chi) {
  const auto& pi = kd.covering;
  if (chi.group.get() != pi.group().get() && chi.values.size() != static_cast<std::size_t>(pi.group()->generator_count()))
    throw InvalidInput("character and covering use different groups");
  DescendResult<S> res;
  res.homothety = check_homothety(kd, chi);

  auto up = pullback_bundle(pi, weight_bundle(negate(chi)));
  auto sec = try_trivializing_section(up);
  if (!sec.section) throw Error("weight bundle is not trivial on the covering (truncated region not simply connected?)");
  const auto& T = *pi.total();
  res.weight = GlobalFunction<S>{pi.total(), std::vector<S>(T.vertex_count())};
  for (std::size_t c = 0; c < up.cover.size(); ++c) {
    // The chart over star(v) that contains a lift of v is that lift's own star.
    VertexId v = up.base_chart[c];
    for (auto x : up.cover[c].vertices())
      if (pi.project(x) == v) res.weight.values[x] = -sec.section->log_values[c];
  }

  const auto& B = kd.base_cover;
  std::vector<std::vector<S>> factors(B.size());
  std::vector<PotentialHandle<S>> handles(B.size());
  for (std::size_t a = 0; a < B.size(); ++a) {
    VertexId v0 = B[a].vertices().front();
    int chosen = -1;
    for (std::size_t c = 0; c < kd.cover.size() && chosen < 0; ++c)
      if (kd.base_chart[c] == static_cast<int>(a) && kd.cover[c].contains_vertex(pi.lift(v0, 0))) chosen = static_cast<int>(c);
    if (chosen < 0) throw Error("no lift of base chart " + std::to_string(a) + " through the identity sheet");
    const auto& C = kd.cover[chosen];
    std::map<VertexId, VertexId> lift_of;
    for (auto x : C.vertices())
      if (!lift_of.emplace(pi.project(x), x).second)
        throw PreconditionFailed("base chart " + std::to_string(a) + " is not evenly covered: vertex " +
                                 std::to_string(pi.project(x)) + " has two lifts in one component");
    for (auto v : B[a].vertices()) {
      auto it = lift_of.find(v);
      if (it == lift_of.end())
        throw TruncationError("lift of base chart " + std::to_string(a) + " is cut by the truncation boundary");
      factors[a].push_back(res.weight(it->second) + kd.potentials[chosen].log_scale);
    }
    handles[a] = kd.potentials[chosen];
    handles[a].log_scale = S{};
  }
  res.lck = LCKData<S>::make(ClosedOneForm<S>::make(B, std::move(factors)), std::move(handles), kd.mode);
  res.lck.partial = kd.partial;
  res.lck.warnings = kd.warnings;
  return res;
}

}  // namespace lcktk
