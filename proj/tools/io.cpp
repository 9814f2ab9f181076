#include "io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lcktk::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw InvalidInput(what); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing \"" + key + "\"");
  return j.at(key);
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where + ": expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(j.get<std::string>(), &pos);
      if (pos == j.get<std::string>().size()) return v;
    } catch (const std::exception&) {
    }
  }
  bad(where + ": expected a number");
}

std::vector<int> int_list(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

psh::cd complex_from(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad(where + ": expected [re, im]");
  return {as_double(j[0], where), as_double(j[1], where)};
}

psh::Point point_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + ": expected a list of [re, im] pairs");
  psh::Point p;
  for (const auto& c : j) p.push_back(complex_from(c, where));
  return p;
}

std::vector<psh::Box> boxes_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + ": expected [[re_min, re_max, im_min, im_max], ...]");
  std::vector<psh::Box> out;
  for (const auto& b : j) {
    if (!b.is_array() || b.size() != 4) bad(where + ": each box needs four bounds");
    out.push_back({as_double(b[0], where), as_double(b[1], where), as_double(b[2], where), as_double(b[3], where)});
  }
  return out;
}

template <class S>
std::vector<std::map<VertexId, S>> chart_maps(const json& list, std::size_t charts, const std::string& where) {
  if (!list.is_array()) bad(where + ": expected an array");
  std::vector<std::map<VertexId, S>> maps(charts);
  std::vector<char> seen(charts, 0);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const int a = as_int(need(list[i], "chart", w), w + ".chart");
    if (a < 0 || a >= static_cast<int>(charts)) bad(w + ": chart " + std::to_string(a) + " out of range");
    if (seen[a]) bad(w + ": chart " + std::to_string(a) + " listed twice");
    seen[a] = 1;
    const auto& vals = need(list[i], "values", w);
    if (!vals.is_object()) bad(w + ".values: expected an object keyed by vertex");
    for (auto it = vals.begin(); it != vals.end(); ++it) {
      int v = 0;
      try {
        std::size_t pos = 0;
        v = std::stoi(it.key(), &pos);
        if (pos != it.key().size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        bad(w + ".values: key \"" + it.key() + "\" is not a vertex index");
      }
      try {
        maps[a][v] = scalar_from_json<S>(it.value());
      } catch (const InvalidInput& e) {
        bad(w + ".values[\"" + it.key() + "\"]: " + e.what());
      }
    }
  }
  for (std::size_t a = 0; a < charts; ++a)
    if (!seen[a]) bad(where + ": no entry for chart " + std::to_string(a));
  return maps;
}

template <class S>
json chart_maps_to_json(const Cover& cover, const std::vector<std::vector<S>>& values) {
  json out = json::array();
  for (std::size_t a = 0; a < cover.size(); ++a) {
    json vals = json::object();
    const auto& vs = cover[a].vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) vals[std::to_string(vs[i])] = scalar_to_json<S>(values[a][i]);
    out.push_back({{"chart", a}, {"values", vals}});
  }
  return out;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Loaded load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  Loaded l;
  l.path = path;
  l.digest = fnv1a_hex(text);
  try {
    l.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
  return l;
}

ComplexPtr complex_from_json(const json& j) {
  const int n = as_int(need(j, "vertices", "complex"), "complex.vertices");
  std::vector<std::array<VertexId, 2>> edges;
  std::vector<std::array<VertexId, 3>> tris;
  if (j.contains("edges"))
    for (const auto& e : j.at("edges")) {
      const auto v = int_list(e, "complex.edges");
      if (v.size() != 2) bad("complex.edges: each edge needs two vertices");
      edges.push_back({v[0], v[1]});
    }
  if (j.contains("triangles"))
    for (const auto& t : j.at("triangles")) {
      const auto v = int_list(t, "complex.triangles");
      if (v.size() != 3) bad("complex.triangles: each triangle needs three vertices");
      tris.push_back({v[0], v[1], v[2]});
    }
  return SimplicialComplex::build(n, edges, tris);
}

json complex_to_json(const SimplicialComplex& k) {
  json edges = json::array(), tris = json::array();
  for (const auto& e : k.edges()) edges.push_back({e.a, e.b});
  for (const auto& t : k.triangles()) tris.push_back({t.a, t.b, t.c});
  return {{"vertices", k.vertex_count()}, {"edges", edges}, {"triangles", tris}};
}

Cover cover_from_json(const ComplexPtr& k, const json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "star")) return star_cover(k);
  const auto& charts = need(j, "charts", "cover");
  if (!charts.is_array()) bad("cover.charts: expected an array");
  std::vector<Subcomplex> out;
  for (std::size_t i = 0; i < charts.size(); ++i) {
    const std::string w = "cover.charts[" + std::to_string(i) + "]";
    const auto& c = charts[i];
    if (c.is_array()) {
      auto vs = int_list(c, w);
      for (int v : vs)
        if (v < 0 || v >= k->vertex_count()) bad(w + ": vertex " + std::to_string(v) + " out of range");
      out.push_back(Subcomplex::induced(k, std::vector<VertexId>(vs.begin(), vs.end())));
    } else if (c.is_object() && c.contains("star")) {
      const int v = as_int(c.at("star"), w + ".star");
      if (v < 0 || v >= k->vertex_count()) bad(w + ": vertex " + std::to_string(v) + " out of range");
      out.push_back(Subcomplex::closed_star(k, v));
    } else if (c.is_object()) {
      std::vector<VertexId> vs;
      if (c.contains("vertices"))
        for (int v : int_list(c.at("vertices"), w + ".vertices")) vs.push_back(v);
      std::vector<int> es, ts;
      if (c.contains("edges"))
        for (const auto& e : c.at("edges")) {
          const auto v = int_list(e, w + ".edges");
          auto idx = v.size() == 2 ? k->edge_index(v[0], v[1]) : std::nullopt;
          if (!idx) bad(w + ".edges: not an edge of the complex");
          es.push_back(*idx);
        }
      if (c.contains("triangles"))
        for (const auto& t : c.at("triangles")) {
          const auto v = int_list(t, w + ".triangles");
          auto idx = v.size() == 3 ? k->triangle_index(v[0], v[1], v[2]) : std::nullopt;
          if (!idx) bad(w + ".triangles: not a triangle of the complex");
          ts.push_back(*idx);
        }
      out.push_back(Subcomplex::from_simplices(k, std::move(vs), std::move(es), std::move(ts)));
    } else {
      bad(w + ": expected a vertex list or an object");
    }
  }
  return Cover(k, std::move(out));
}

json cover_to_json(const Cover& c) {
  const auto& k = *c.parent();
  json charts = json::array();
  for (const auto& s : c.charts()) {
    json es = json::array(), ts = json::array();
    for (int e : s.edges()) es.push_back({k.edges()[e].a, k.edges()[e].b});
    for (int t : s.triangles()) ts.push_back({k.triangles()[t].a, k.triangles()[t].b, k.triangles()[t].c});
    charts.push_back({{"vertices", s.vertices()}, {"edges", es}, {"triangles", ts}});
  }
  return {{"charts", charts}};
}

EdgePath path_from_text(const std::string& text) {
  EdgePath p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      p.vertices.push_back(std::stoi(item, &pos));
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      bad("path: \"" + item + "\" is not a vertex index");
    }
  }
  if (p.vertices.empty()) bad("path is empty");
  return p;
}

ScalarMode scalar_mode(const json& doc) {
  if (!doc.is_object() || !doc.contains("scalar")) return ScalarMode::exact;
  const auto s = doc.at("scalar");
  if (s == "exact") return ScalarMode::exact;
  if (s == "float") return ScalarMode::floating;
  bad("scalar: expected \"exact\" or \"float\"");
}

template <>
Exact scalar_from_json<Exact>(const json& j) {
  if (j.is_number_integer()) return Exact(j.get<long long>());
  if (!j.is_string()) bad("exact scalars are written as strings such as \"1/3\" or \"log(2)\"");
  try {
    return Exact::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    bad("cannot parse scalar \"" + j.get<std::string>() + "\": " + e.what());
  }
}

template <>
double scalar_from_json<double>(const json& j) {
  if (j.is_string()) {
    try {
      return Exact::parse(j.get<std::string>()).to_double();
    } catch (const std::exception&) {
    }
  }
  return as_double(j, "scalar");
}

template <>
json scalar_to_json<Exact>(const Exact& v) {
  return v.str();
}

template <>
json scalar_to_json<double>(const double& v) {
  return v;
}

template <class S>
ClosedOneForm<S> form_from_json(const json& doc) {
  auto k = complex_from_json(need(doc, "complex", "form"));
  auto cover = cover_from_json(k, doc.contains("cover") ? doc.at("cover") : json());
  auto maps = chart_maps<S>(need(doc, "potentials", "form"), cover.size(), "potentials");
  return ClosedOneForm<S>::make(std::move(cover), maps);
}

template <class S>
json form_to_json(const ClosedOneForm<S>& theta) {
  json j{{"scalar", ScalarTraits<S>::exact ? "exact" : "float"},
         {"complex", complex_to_json(*theta.complex())},
         {"cover", cover_to_json(theta.cover())},
         {"potentials", chart_maps_to_json<S>(theta.cover(), theta.potentials())}};
  if (!theta.base_chart.empty()) j["base_chart"] = theta.base_chart;
  if (!theta.warnings.empty()) j["warnings"] = theta.warnings;
  return j;
}

template <class S>
LCKData<S> lck_from_json(const json& doc) {
  auto k = complex_from_json(need(doc, "complex", "lck"));
  auto cover = cover_from_json(k, doc.contains("cover") ? doc.at("cover") : json());
  const std::size_t n = cover.size();
  auto maps = chart_maps<S>(need(doc, "conformal_factors", "lck"), n, "conformal_factors");
  auto factors = ClosedOneForm<S>::make(std::move(cover), maps);
  std::vector<PotentialHandle<S>> handles(n);
  for (std::size_t a = 0; a < n; ++a) handles[a] = {PotentialHandle<S>::Kind::abstract, "phi" + std::to_string(a), S{}};
  if (doc.contains("potentials")) {
    const auto& ps = doc.at("potentials");
    if (!ps.is_array()) bad("potentials: expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string w = "potentials[" + std::to_string(i) + "]";
      const int a = as_int(need(ps[i], "chart", w), w + ".chart");
      if (a < 0 || a >= static_cast<int>(n)) bad(w + ": chart out of range");
      auto& h = handles[a];
      const std::string kind = ps[i].value("kind", "abstract");
      if (kind == "grid") {
        h.kind = PotentialHandle<S>::Kind::grid;
        h.ref = need(ps[i], "grid_ref", w).template get<std::string>();
      } else if (kind == "abstract") {
        h.ref = ps[i].value("ref", h.ref);
      } else {
        bad(w + ".kind: expected \"abstract\" or \"grid\"");
      }
      if (ps[i].contains("log_scale")) h.log_scale = scalar_from_json<S>(ps[i].at("log_scale"));
    }
  }
  LckMode mode = LckMode::lck;
  if (doc.contains("mode")) {
    if (doc.at("mode") == "lcpk")
      mode = LckMode::lcpk;
    else if (doc.at("mode") != "lck")
      bad("mode: expected \"lck\" or \"lcpk\"");
  }
  return LCKData<S>::make(std::move(factors), std::move(handles), mode);
}

template <class S>
json lck_to_json(const LCKData<S>& d) {
  json pots = json::array();
  for (std::size_t a = 0; a < d.potentials.size(); ++a) {
    const auto& h = d.potentials[a];
    json p{{"chart", a}, {"kind", h.kind == PotentialHandle<S>::Kind::grid ? "grid" : "abstract"},
           {"log_scale", scalar_to_json<S>(h.log_scale)}};
    p[h.kind == PotentialHandle<S>::Kind::grid ? "grid_ref" : "ref"] = h.ref;
    pots.push_back(p);
  }
  json j{{"scalar", ScalarTraits<S>::exact ? "exact" : "float"},
         {"complex", complex_to_json(*d.complex())},
         {"cover", cover_to_json(d.cover())},
         {"conformal_factors", chart_maps_to_json<S>(d.cover(), d.factors.potentials())},
         {"potentials", pots},
         {"mode", d.mode == LckMode::lck ? "lck" : "lcpk"}};
  if (d.partial) j["partial"] = true;
  if (!d.warnings.empty()) j["warnings"] = d.warnings;
  return j;
}

template ClosedOneForm<Exact> form_from_json<Exact>(const json&);
template ClosedOneForm<double> form_from_json<double>(const json&);
template json form_to_json<Exact>(const ClosedOneForm<Exact>&);
template json form_to_json<double>(const ClosedOneForm<double>&);
template LCKData<Exact> lck_from_json<Exact>(const json&);
template LCKData<double> lck_from_json<double>(const json&);
template json lck_to_json<Exact>(const LCKData<Exact>&);
template json lck_to_json<double>(const LCKData<double>&);

// ---------------------------------------------------------------------------
// Grids, maps and well-related specs

psh::GridDomain domain_from_json(const json& j) {
  const int dim = as_int(need(j, "dim", "domain"), "domain.dim");
  return psh::GridDomain(dim, boxes_from(need(j, "box", "domain"), "domain.box"),
                         as_double(need(j, "h", "domain"), "domain.h"));
}

json domain_to_json(const psh::GridDomain& d) {
  json boxes = json::array();
  for (const auto& b : d.box()) boxes.push_back({b.re_min, b.re_max, b.im_min, b.im_max});
  return {{"dim", d.dim()}, {"box", boxes}, {"h", d.h()}};
}

psh::GridFunction grid_from_json(const json& j) {
  psh::GridFunction g{domain_from_json(need(j, "domain", "grid")), {}};
  const auto& v = need(j, "values", "grid");
  if (!v.is_array()) bad("grid.values: expected an array");
  if (v.size() != g.domain.size())
    bad("grid.values: " + std::to_string(v.size()) + " values for " + std::to_string(g.domain.size()) + " nodes");
  g.values.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = as_double(v[i], "grid.values[" + std::to_string(i) + "]");
    if (!std::isfinite(x)) bad("grid.values[" + std::to_string(i) + "] is not finite");
    g.values.push_back(x);
  }
  return g;
}

json grid_to_json(const psh::GridFunction& g) { return {{"domain", domain_to_json(g.domain)}, {"values", g.values}}; }

psh::HolomorphicMap map_from_json(const json& j) {
  const int n = as_int(need(j, "dim_in", "map"), "map.dim_in");
  const int m = as_int(need(j, "dim_out", "map"), "map.dim_out");
  const auto& polys = need(j, "polys", "map");
  if (!polys.is_array()) bad("map.polys: expected an array");
  std::vector<std::vector<psh::HolomorphicMap::Monomial>> comps;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const std::string w = "map.polys[" + std::to_string(i) + "]";
    const auto& coeffs = need(polys[i], "coeffs", w);
    if (!coeffs.is_object()) bad(w + ".coeffs: expected an object keyed by monomial");
    std::vector<psh::HolomorphicMap::Monomial> comp;
    for (auto it = coeffs.begin(); it != coeffs.end(); ++it) {
      std::vector<int> e;
      std::stringstream ss(it.key());
      std::string part;
      while (std::getline(ss, part, ',')) {
        try {
          e.push_back(std::stoi(part));
        } catch (const std::exception&) {
          bad(w + ".coeffs: bad monomial \"" + it.key() + "\"");
        }
      }
      comp.push_back({e, complex_from(it.value(), w + ".coeffs[\"" + it.key() + "\"]")});
    }
    comps.push_back(std::move(comp));
  }
  return psh::HolomorphicMap(n, m, std::move(comps), j.value("discrete_fibers", true));
}

psh::Region region_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "interior") return psh::Region::interior();
  if (j.is_object() && j.contains("box")) return psh::Region::box_region(boxes_from(j.at("box"), "region.box"));
  if (j.is_object() && j.contains("annulus")) {
    const auto& a = j.at("annulus");
    return psh::Region::annulus(point_from(need(a, "center", "region.annulus"), "region.annulus.center"),
                                as_double(need(a, "r_min", "region.annulus"), "region.annulus.r_min"),
                                as_double(need(a, "r_max", "region.annulus"), "region.annulus.r_max"));
  }
  bad("region: expected \"interior\", {\"box\": ...} or {\"annulus\": ...}");
}

psh::FieldPtr field_from_json(const json& j, const std::filesystem::path& base_dir, std::vector<std::string>* digests) {
  if (!j.is_object()) bad("field: expected an object");
  if (j.contains("poly")) {
    const auto& terms = j.at("poly");
    if (!terms.is_array() || terms.empty()) bad("field.poly: expected a nonempty array of terms");
    const int dim = static_cast<int>(need(terms[0], "z", "field.poly[0]").size());
    std::vector<psh::PolyTerm> out;
    for (const auto& t : terms)
      out.push_back({complex_from(need(t, "c", "field.poly"), "field.poly.c"), int_list(need(t, "z", "field.poly"), "field.poly.z"),
                     int_list(need(t, "zbar", "field.poly"), "field.poly.zbar")});
    return psh::polynomial_field(dim, std::move(out));
  }
  if (j.contains("bump")) {
    const auto& b = j.at("bump");
    return psh::radial_bump(point_from(need(b, "center", "field.bump"), "field.bump.center"),
                            as_double(need(b, "r_in", "field.bump"), "field.bump.r_in"),
                            as_double(need(b, "r_out", "field.bump"), "field.bump.r_out"));
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.is_string()) {
      auto l = load(base_dir / g.get<std::string>());
      if (digests) digests->push_back(l.path.string() + " " + l.digest);
      return psh::sampled_field(grid_from_json(l.doc));
    }
    return psh::sampled_field(grid_from_json(g));
  }
  if (j.contains("sum")) {
    std::vector<std::pair<double, psh::FieldPtr>> terms;
    for (const auto& t : j.at("sum")) {
      if (!t.is_array() || t.size() != 2) bad("field.sum: expected [[weight, field], ...]");
      terms.push_back({as_double(t[0], "field.sum weight"), field_from_json(t[1], base_dir, digests)});
    }
    return psh::linear_combination(std::move(terms));
  }
  bad("field: expected one of \"poly\", \"bump\", \"grid\", \"sum\"");
}

psh::WellRelatedSpec spec_from_json(const json& j, const std::filesystem::path& base_dir,
                                    std::vector<std::string>* digests) {
  psh::WellRelatedSpec s;
  s.source = domain_from_json(need(j, "source", "spec"));
  s.target = domain_from_json(need(j, "target", "spec"));
  s.map = std::make_shared<psh::HolomorphicMap>(map_from_json(need(j, "map", "spec")));
  for (const auto& t : need(j, "targets", "spec"))
    s.targets.push_back({region_from_json(need(t, "V", "spec.targets")),
                         field_from_json(need(t, "psi", "spec.targets"), base_dir, digests),
                         field_from_json(need(t, "tau", "spec.targets"), base_dir, digests)});
  for (const auto& t : need(j, "sources", "spec"))
    s.sources.push_back({as_int(need(t, "target", "spec.sources"), "spec.sources.target"),
                         region_from_json(need(t, "selector", "spec.sources")),
                         field_from_json(need(t, "phi", "spec.sources"), base_dir, digests)});
  if (j.contains("margin")) s.margin = as_double(j.at("margin"), "spec.margin");
  return s;
}

json point_to_json(const psh::Point& p) {
  json out = json::array();
  for (const auto& c : p) out.push_back({c.real(), c.imag()});
  return out;
}

psh::Point point_from_text(const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      xs.push_back(std::stod(item));
    } catch (const std::exception&) {
      bad("point: \"" + item + "\" is not a number");
    }
  }
  if (xs.empty() || xs.size() % 2) bad("point: expected re,im pairs");
  psh::Point p;
  for (std::size_t i = 0; i < xs.size(); i += 2) p.push_back({xs[i], xs[i + 1]});
  return p;
}

}  // namespace lcktk::io
