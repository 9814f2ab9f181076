#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "io.hpp"
#include "lcktk/cech.hpp"
#include "lcktk/conformal.hpp"
#include "lcktk/covering.hpp"
#include "lcktk/psh.hpp"

namespace {

using namespace lcktk;
using io::json;

struct Options {
  bool json = false;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int radius = 3;

  std::string form, lck, grid, spec, region, out, path, point, epsilon;
  std::vector<std::string> loops;
  int basepoint = 0;
  double margin = 1e-6;
  bool pluriharmonic = false;
};

/// Outcome of one run: echoed command, input digests, checks and results.
/// Wall-clock time is printed on the human channel only.
struct Report {
  std::string command;
  json inputs = json::array();
  json checks = json::array();
  json result = json::object();
  std::string stage;
  bool input_error = false;

  void input(const io::Loaded& l) { inputs.push_back({{"path", l.path.string()}, {"fnv1a", l.digest}}); }
  void input(const std::string& path, const std::string& digest) {
    inputs.push_back({{"path", path}, {"fnv1a", digest}});
  }

  void add(const std::string& name, const std::string& status, json detail, json witness = nullptr) {
    json c{{"name", name}, {"status", status}, {"detail", std::move(detail)}};
    if (status == "fail" && witness.is_null()) witness = json{{"reason", c["detail"]}};
    if (!witness.is_null()) c["witness"] = std::move(witness);
    checks.push_back(std::move(c));
  }
  void add(const std::string& name, const char* status, json detail, json witness = nullptr) {
    add(name, std::string(status), std::move(detail), std::move(witness));
  }
  void add(const std::string& name, bool pass, json detail, json witness = nullptr) {
    add(name, std::string(pass ? "pass" : "fail"), std::move(detail), std::move(witness));
  }

  int exit_code() const {
    if (input_error) return 2;
    for (const auto& c : checks)
      if (c["status"] == "fail") return 1;
    return 0;
  }

  json to_json() const {
    return {{"command", command}, {"inputs", inputs}, {"checks", checks}, {"result", result},
            {"status", exit_code() == 0 ? "pass" : exit_code() == 1 ? "fail" : "input_error"}};
  }

  void print_human(std::ostream& os, double seconds) const {
    os << "command: " << command << "\n";
    for (const auto& in : inputs) os << "input: " << in["path"].get<std::string>() << " (" << in["fnv1a"].get<std::string>() << ")\n";
    for (const auto& c : checks) {
      os << c["name"].get<std::string>() << ": ";
      std::string st = c["status"];
      for (auto& ch : st) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      os << st;
      if (!c["detail"].is_null()) os << "  " << (c["detail"].is_string() ? c["detail"].get<std::string>() : c["detail"].dump());
      os << "\n";
      if (c.contains("witness")) os << "  witness: " << c["witness"].dump() << "\n";
    }
    for (auto it = result.begin(); it != result.end(); ++it) {
      os << it.key() << ": ";
      if (it.value().is_string())
        os << it.value().get<std::string>() << "\n";
      else
        os << it.value().dump() << "\n";
    }
    os << "elapsed: " << seconds << " s\n";
  }
};

json path_json(const EdgePath& p) { return to_string(p); }

json word_json(const Word& w) { return to_string(w); }

template <class S>
json function_json(const GlobalFunction<S>& f) {
  json vals = json::object();
  for (std::size_t v = 0; v < f.values.size(); ++v) vals[std::to_string(v)] = io::scalar_to_json<S>(f.values[v]);
  return vals;
}

template <class S>
json character_json(const Character<S>& chi) {
  json gens = json::array();
  const auto& g = *chi.group;
  const auto& K = *g.complex();
  for (int i = 0; i < g.generator_count(); ++i) {
    const auto& e = K.edges()[g.generator_edge(i)];
    gens.push_back({{"generator", i}, {"edge", {e.a, e.b}}, {"loop", path_json(g.generator_loop(i))},
                    {"value", io::scalar_to_json<S>(chi.values[i])}});
  }
  // Generators that survive Tietze simplification, valued through the original
  // generator they came from.
  json reduced = json::array();
  const auto& simp = g.simplified();
  for (int j = 0; j < simp.presentation.generators; ++j)
    for (int i = 0; i < g.generator_count(); ++i)
      if (simp.images[i] == Word{j + 1}) {
        reduced.push_back({{"generator", i}, {"loop", path_json(g.generator_loop(i))},
                           {"value", io::scalar_to_json<S>(chi.values[i])},
                           {"multiplier", std::exp(ScalarTraits<S>::real_value(chi.values[i]))}});
        break;
      }
  return {{"generators", gens}, {"reduced", reduced}, {"trivial", chi.is_trivial()}};
}

template <class S>
bool same_values(const std::vector<S>& a, const std::vector<S>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!ScalarTraits<S>::equal(a[i], b[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// cech

template <class S>
void cech_integrate(const ClosedOneForm<S>& theta, const Options& o, Report& r) {
  auto path = io::path_from_text(o.path);
  validate_path(*theta.complex(), path);
  r.stage = "integrate";
  auto cert = homotopy_invariant_integrate(theta, path, HomotopyBudget{}, o.seed);
  r.result["path"] = path_json(path);
  r.result["value"] = io::scalar_to_json<S>(cert.value);
  json detail{{"explored", cert.explored}, {"complete", cert.complete}};
  json witness = nullptr;
  if (!cert.consistent && cert.counterexample)
    witness = {{"path", path_json(*cert.counterexample)},
               {"value", io::scalar_to_json<S>(integrate(theta, *cert.counterexample))}};
  r.add("homotopy invariance", cert.consistent ? (cert.complete ? "pass" : "partial") : "fail", detail, witness);
}

template <class S>
void cech_monodromy(const ClosedOneForm<S>& theta, const Options& o, Report& r) {
  auto chi = monodromy_character(theta, o.basepoint);
  r.result["basepoint"] = o.basepoint;
  r.result["character"] = character_json(chi);
  json loops = json::array();
  for (const auto& text : o.loops) {
    auto p = io::path_from_text(text);
    validate_path(*theta.complex(), p);
    if (!p.is_loop()) throw InvalidInput("--loop " + text + " is not closed");
    loops.push_back({{"loop", path_json(p)}, {"value", io::scalar_to_json<S>(integrate(theta, p))}});
  }
  if (!o.loops.empty()) r.result["loops"] = loops;
  const auto bad = chi.failing_relator();
  json witness = nullptr;
  if (bad) witness = {{"relator", word_json(chi.group->presentation().relators[*bad])}};
  r.add("homomorphism", !bad, json{{"relators", chi.group->presentation().relators.size()}}, witness);
}

template <class S>
void cech_exact(const ClosedOneForm<S>& theta, const Options& o, Report& r) {
  auto res = is_exact(theta, o.basepoint);
  if (res) {
    r.result["primitive"] = function_json(*res.primitive);
    r.add("exact", true, "primitive found");
  } else {
    const auto& w = *res.witness;
    r.add("exact", false, "nonzero loop integral",
          json{{"generator", w.generator}, {"loop", path_json(w.loop)}, {"integral", io::scalar_to_json<S>(w.integral)}});
  }
}

template <class S>
void cech_primitive(const ClosedOneForm<S>& theta, const Options& o, Report& r) {
  try {
    auto f = primitive_on_simply_connected(theta, o.basepoint);
    r.result["primitive"] = function_json(f);
    const auto defect = primitive_local_defect(theta, f);
    r.add("primitive", !defect, defect ? json(*defect) : json("df equals the form on every chart"));
  } catch (const PreconditionFailed& e) {
    auto g = edge_path_group(theta.complex(), o.basepoint);
    const int gen = nontrivial_generator(*g);
    json witness{{"reason", e.what()}};
    if (gen >= 0) {
      witness["generator"] = gen;
      witness["loop"] = path_json(g->generator_loop(gen));
      witness["integral"] = io::scalar_to_json<S>(integrate(theta, g->generator_loop(gen)));
    }
    r.add("primitive", false, "complex is not proved simply connected", witness);
  }
}

json cover_summary(const CoveringMap& pi) {
  return {{"sheets", pi.sheet_count()}, {"truncated", pi.truncated()}, {"radius", pi.radius()},
          {"vertices", pi.total()->vertex_count()}, {"edges", pi.total()->edges().size()},
          {"triangles", pi.total()->triangles().size()}};
}

void write_json(const std::string& file, const json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + file);
  out << j.dump(2) << "\n";
}

template <class S>
void cech_pullback(const ClosedOneForm<S>& theta, const Options& o, Report& r) {
  r.stage = "universal_cover";
  auto pi = universal_cover(theta.complex(), o.radius, o.basepoint);
  r.stage = "pullback";
  auto up = pullback_form(pi, theta);
  r.result["cover"] = cover_summary(pi);
  r.result["charts"] = up.cover().size();
  if (!o.out.empty())
    write_json(o.out, io::form_to_json(up));
  else
    r.result["form"] = io::form_to_json(up);

  // Lifted generator loops integrate to the same values upstairs.
  auto g = edge_path_group(theta.complex(), o.basepoint);
  std::size_t lifted = 0, skipped = 0;
  json witness = nullptr;
  for (int i = 0; i < g->generator_count() && witness.is_null(); ++i) {
    const auto loop = g->generator_loop(i);
    try {
      const auto path = pi.lift_path(loop, pi.basepoint_lift());
      ++lifted;
      const S down = integrate(theta, loop), above = integrate(up, path);
      if (!ScalarTraits<S>::equal(down, above))
        witness = {{"loop", path_json(loop)}, {"lift", path_json(path)}, {"base", io::scalar_to_json<S>(down)},
                   {"cover", io::scalar_to_json<S>(above)}};
    } catch (const TruncationError&) {
      ++skipped;
    }
  }
  r.add("lifted loop integrals", witness.is_null() ? (skipped ? "partial" : "pass") : "fail",
        json{{"lifted", lifted}, {"skipped", skipped}}, witness);

  auto ex = is_exact(up, pi.basepoint_lift());
  if (ex) {
    r.add("exact on cover", true, "primitive found");
  } else {
    const auto& w = *ex.witness;
    json wj{{"loop", path_json(w.loop)}, {"integral", io::scalar_to_json<S>(w.integral)}};
    // A truncated word ball need not be simply connected; that is not a failure of the form.
    r.add("exact on cover", pi.truncated() ? "partial" : "fail", "loop with nonzero integral", wj);
  }
}

template <class S>
void run_cech(const std::string& sub, const json& doc, const Options& o, Report& r) {
  r.stage = "load";
  auto theta = io::form_from_json<S>(doc);
  for (const auto& w : theta.warnings) r.add("load", "partial", w);
  if (sub == "integrate") cech_integrate(theta, o, r);
  if (sub == "monodromy") cech_monodromy(theta, o, r);
  if (sub == "exact") cech_exact(theta, o, r);
  if (sub == "primitive") cech_primitive(theta, o, r);
  if (sub == "pullback") cech_pullback(theta, o, r);
}

// ---------------------------------------------------------------------------
// lck

template <class S>
json homothety_check(const KahlerData<S>& kd, const Character<S>& chi, Report& r) {
  try {
    auto h = check_homothety(kd, chi);
    r.add("homothety", h.skipped ? "partial" : "pass", json{{"checked", h.checked}, {"skipped", h.skipped}});
    return json{{"checked", h.checked}, {"skipped", h.skipped}};
  } catch (const HomothetyError& e) {
    r.add("homothety", false, e.what(), json{{"element", word_json(e.element)}, {"chart", e.chart}, {"vertex", e.vertex}});
    return nullptr;
  }
}

template <class S>
json kahler_json(const KahlerData<S>& kd) {
  json charts = json::array();
  for (std::size_t c = 0; c < kd.cover.size(); ++c)
    charts.push_back({{"vertices", kd.cover[c].vertices()}, {"base_chart", kd.base_chart[c]},
                      {"ref", kd.potentials[c].ref}, {"log_scale", io::scalar_to_json<S>(kd.potentials[c].log_scale)}});
  return {{"cover", cover_summary(kd.covering)}, {"partial", kd.partial}, {"charts", charts}};
}

template <class S>
void run_lck(const std::string& sub, const json& doc, const Options& o, Report& r) {
  r.stage = "load";
  auto lck = io::lck_from_json<S>(doc);

  if (sub == "lee") {
    r.stage = "lee";
    r.result["lee_form"] = io::form_to_json(lee_form(lck));
    r.result["character"] = character_json(monodromy_character(lee_form(lck), o.basepoint));
    return;
  }
  if (sub == "gck") {
    r.stage = "gck";
    auto res = is_gck(lck, o.basepoint);
    if (res) {
      r.result["rescale"] = function_json(*res.primitive);
      r.add("globally conformally Kähler", true, "Lee form is exact");
    } else {
      const auto& w = *res.witness;
      r.add("globally conformally Kähler", false, "Lee form has a nonzero period",
            json{{"generator", w.generator}, {"loop", path_json(w.loop)}, {"period", io::scalar_to_json<S>(w.integral)}});
    }
    return;
  }

  r.stage = "universal_cover";
  auto pi = universal_cover(lck.complex(), o.radius, o.basepoint);
  r.result["cover"] = cover_summary(pi);
  r.stage = "lift";
  auto lift = lift_to_kahler(lck, pi);
  r.result["character"] = character_json(lift.character);

  if (sub == "character") {
    const auto lee = monodromy_character(lee_form(lck), o.basepoint);
    r.add("matches Lee monodromy", same_values(lift.character.values, lee.values), "homothety character vs periods");
    r.add("homomorphism", lift.character.is_homomorphism(), "character kills every relator");
    return;
  }
  if (sub == "lift") {
    r.result["kahler"] = kahler_json(lift.kahler);
    r.stage = "homothety";
    homothety_check(lift.kahler, lift.character, r);
    return;
  }

  r.stage = "descend";
  auto down = descend_to_lck(lift.kahler, lift.character);
  if (sub == "descend") {
    r.result["lck"] = io::lck_to_json(down.lck);
    r.add("homothety", down.homothety.skipped ? "partial" : "pass",
          json{{"checked", down.homothety.checked}, {"skipped", down.homothety.skipped}});
    return;
  }

  // roundtrip
  r.stage = "homothety";
  homothety_check(lift.kahler, lift.character, r);
  r.stage = "equivalence";
  auto f = equivalent_up_to_rescale(lck, down.lck);
  if (f) {
    const bool identical = std::all_of(f->values.begin(), f->values.end(), [](const S& v) { return ScalarTraits<S>::is_zero(v); });
    r.result["round_trip"] = identical ? "exact" : "up to rescale";
    r.add("round trip", true, identical ? "descended data equals the input" : "descended data is a conformal rescale of the input");
  } else {
    r.add("round trip", false, "descended data is not conformally equivalent to the input",
          json{{"descended", io::lck_to_json(down.lck)}});
  }
  const auto periods = monodromy_character(lee_form(down.lck), o.basepoint);
  const auto original = monodromy_character(lee_form(lck), o.basepoint);
  r.add("Lee periods preserved", same_values(periods.values, original.values), "monodromy of descended Lee form");
  if (!pi.truncated()) {
    r.stage = "finite group";
    auto res = is_gck(lck, o.basepoint);
    r.result["conclusion"] = "finite fundamental group ⇒ GCK";
    json witness = nullptr;
    if (!res) witness = {{"loop", path_json(res.witness->loop)}, {"period", io::scalar_to_json<S>(res.witness->integral)}};
    r.add("finite fundamental group ⇒ GCK", lift.character.is_trivial() && static_cast<bool>(res),
          json{{"order", pi.sheet_count()}}, witness);
  }
}

// ---------------------------------------------------------------------------
// psh

json point_json(const psh::Point& p) { return io::point_to_json(p); }

json hermitian_json(const psh::Hermitian& h) {
  json rows = json::array();
  for (int j = 0; j < h.n; ++j) {
    json row = json::array();
    for (int k = 0; k < h.n; ++k) row.push_back({h(j, k).real(), h(j, k).imag()});
    rows.push_back(row);
  }
  return {{"matrix", rows}, {"min_eigenvalue", psh::min_eigenvalue(h)}, {"max_eigenvalue", psh::max_eigenvalue(h)}};
}

json psh_check_json(const psh::PshCheck& c) {
  return {{"samples", c.samples}, {"worst", c.worst}, {"worst_point", point_json(c.worst_point)}};
}

json witness_json(const psh::Witness& w) {
  return {{"chart", w.chart}, {"node", w.node}, {"point", point_json(w.point)}, {"value", w.value}, {"what", w.what}};
}

psh::Region load_region(const Options& o, Report& r) {
  if (o.region.empty()) return psh::Region::interior();
  auto l = io::load(o.region);
  r.input(l);
  return io::region_from_json(l.doc);
}

void psh_grid(const std::string& sub, const Options& o, Report& r) {
  auto l = io::load(o.grid);
  r.input(l);
  r.stage = "load";
  auto g = io::grid_from_json(l.doc);
  auto region = load_region(o, r);
  if (sub == "hessian") {
    r.stage = "hessian";
    if (!o.point.empty()) {
      auto p = io::point_from_text(o.point);
      auto node = g.domain.nearest_node(p);
      if (!node) throw InvalidInput("point outside the grid domain");
      r.result["node"] = point_json(g.domain.point(*node));
      r.result["hessian"] = hermitian_json(psh::complex_hessian(g, *node));
      return;
    }
    const auto nodes = psh::region_nodes(g.domain, region);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t lo_node = 0, hi_node = 0;
    for (auto n : nodes) {
      const auto h = psh::complex_hessian(g, n);
      const double a = psh::min_eigenvalue(h), b = psh::max_eigenvalue(h);
      if (a < lo) lo = a, lo_node = n;
      if (b > hi) hi = b, hi_node = n;
    }
    r.result["samples"] = nodes.size();
    if (!nodes.empty()) {
      r.result["min_eigenvalue"] = {{"value", lo}, {"point", point_json(g.domain.point(lo_node))}};
      r.result["max_eigenvalue"] = {{"value", hi}, {"point", point_json(g.domain.point(hi_node))}};
    }
    return;
  }
  r.stage = "check";
  if (o.pluriharmonic) {
    auto c = psh::is_pluriharmonic(g, region, o.tol);
    r.add("pluriharmonic", c.pass, psh_check_json(c), c.pass ? json() : json{{"point", point_json(c.worst_point)}, {"max_entry", c.worst}});
  } else {
    auto c = psh::is_strongly_psh(g, region, o.margin);
    r.add("strongly plurisubharmonic", c.pass, psh_check_json(c),
          c.pass ? json() : json{{"point", point_json(c.worst_point)}, {"min_eigenvalue", c.worst}});
  }
}

bool report_validation(const psh::WellRelatedReport& rep, Report& r) {
  static const char* names[] = {"psi strongly psh on V", "tau compactly supported in V",
                                "phi positive and strongly psh on U", "single preimage component"};
  for (const auto& c : rep.conditions) {
    json ws = json::array();
    for (std::size_t i = 0; i < c.witnesses.size() && i < 5; ++i) ws.push_back(witness_json(c.witnesses[i]));
    const std::string name = "condition " + std::to_string(c.condition) + " " + names[c.condition - 1];
    r.add(name, c.pass, c.detail, c.pass ? json() : json{{"witnesses", ws}});
  }
  json comps = json::array();
  for (const auto& m : rep.components) comps.push_back(std::count(m.begin(), m.end(), 1));
  r.result["component_nodes"] = comps;
  return rep.pass();
}

json constants_json(const std::vector<psh::LeviConstants>& cs) {
  json out = json::array();
  for (const auto& c : cs)
    out.push_back({{"p", c.p}, {"q", c.q}, {"b", c.b}, {"c", c.c}, {"samples", c.samples}});
  return out;
}

json plan_json(const psh::EpsilonPlan& plan) {
  json regions = json::array();
  for (const auto& g : plan.regions)
    regions.push_back({{"chart", g.chart}, {"index", g.index}, {"P", g.P}, {"sum_b", g.sum_b},
                       {"max_c2_over_q", g.max_c2_over_q}, {"delta", g.delta}});
  return {{"epsilon", plan.epsilon}, {"regions", regions}, {"halvings", plan.halvings}};
}

void report_plan_check(const psh::PlanCheck& c, Report& r) {
  r.add("plan inequalities", c.pass(),
        json{{"samples", c.samples}, {"violations", c.violations}, {"half_violations", c.half_violations},
             {"min_slack", c.min_slack}},
        c.pass() ? json() : witness_json(c.worst));
}

std::vector<double> parse_epsilon(const std::string& text, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidInput("--epsilon: \"" + item + "\" is not a number");
    }
  }
  if (out.size() == 1) out.assign(n, out[0]);
  if (out.size() != n) throw InvalidInput("--epsilon needs 1 or " + std::to_string(n) + " values");
  return out;
}

void report_glue(const psh::GlueResult& glue, Report& r) {
  double worst = 0;
  json witness = nullptr;
  bool pass = true;
  for (const auto& ov : glue.overlaps) {
    worst = std::max(worst, ov.check.worst);
    if (!ov.check.pass && pass) {
      pass = false;
      witness = {{"charts", {ov.a, ov.b}}, {"point", point_json(ov.check.worst_point)}, {"max_entry", ov.check.worst}};
    }
  }
  r.add("overlap differences pluriharmonic", pass, json{{"pairs", glue.overlaps.size()}, {"max_entry", worst}}, witness);
}

void report_glued(const psh::GluedCheck& v, Report& r) {
  double worst = std::numeric_limits<double>::infinity();
  json witness = nullptr;
  for (std::size_t a = 0; a < v.charts.size(); ++a) {
    const auto& c = v.charts[a];
    if (c.samples) worst = std::min(worst, c.worst);
    if (!c.pass && witness.is_null())
      witness = {{"chart", a}, {"point", point_json(c.worst_point)}, {"min_eigenvalue", c.worst}};
  }
  r.add("glued potentials strongly psh", v.pass(), json{{"charts", v.charts.size()}, {"min_eigenvalue", worst}}, witness);
  r.result["worst_margin"] = worst;
}

void psh_spec(const std::string& sub, const Options& o, Report& r) {
  auto l = io::load(o.spec);
  r.input(l);
  r.stage = "load";
  std::vector<std::string> refs;
  auto spec = io::spec_from_json(l.doc, std::filesystem::path(o.spec).parent_path(), &refs);
  for (const auto& ref : refs) {
    const auto cut = ref.rfind(' ');
    r.input(ref.substr(0, cut), ref.substr(cut + 1));
  }

  if (sub == "pipeline") {
    r.stage = "pipeline";
    auto res = psh::run_pipeline(spec, o.margin);
    report_validation(res.validation, r);
    if (!res.constants.empty()) r.result["constants"] = constants_json(res.constants);
    if (res.plan) {
      report_plan_check(res.plan->check, r);
      r.result["plan"] = plan_json(*res.plan);
    }
    if (res.glue) report_glue(*res.glue, r);
    if (res.verification) report_glued(*res.verification, r);
    if (!res.pass()) r.add("pipeline", false, "stopped at " + res.failed_stage, json{{"stage", res.failed_stage}});
    if (res.plan) r.result["epsilon"] = res.plan->epsilon;
    return;
  }

  r.stage = "validate";
  const bool valid = report_validation(psh::validate_well_related(spec), r);
  if (sub == "wellrelated" || !valid) return;
  auto pc = psh::prepare(spec);
  r.stage = "levi_constants";
  auto cs = psh::chart_constants(pc);
  r.result["constants"] = constants_json(cs);
  r.stage = "plan";
  auto plan = psh::epsilon_plan(pc, cs);
  r.result["plan"] = plan_json(plan);
  if (sub == "plan") {
    report_plan_check(plan.check, r);
    return;
  }
  auto eps = o.epsilon.empty() ? plan.epsilon : parse_epsilon(o.epsilon, spec.sources.size());
  if (!o.epsilon.empty()) {
    plan.epsilon = eps;
    report_plan_check(psh::verify_plan(pc, plan), r);
  } else {
    report_plan_check(plan.check, r);
  }
  r.stage = "glue";
  auto glue = psh::glue_potentials(pc, eps);
  report_glue(glue, r);
  if (sub == "glue" && !o.out.empty()) {
    json grids = json::array();
    for (const auto& g : glue.glued) grids.push_back(io::grid_to_json(g));
    write_json(o.out, json{{"epsilon", eps}, {"phi_eps", io::grid_to_json(glue.phi_eps)}, {"glued", grids}});
  }
  if (sub == "verify") {
    r.stage = "verify";
    report_glued(psh::verify_glued_psh(pc, glue, o.margin), r);
  }
  r.result["epsilon"] = eps;
}

// ---------------------------------------------------------------------------

template <class F>
void with_scalar(const json& doc, F&& f) {
  if (io::scalar_mode(doc) == io::ScalarMode::exact)
    f(Exact{});
  else
    f(0.0);
}

int run(const std::string& group, const std::string& sub, const Options& o, Report& r) {
  r.stage = "load";
  if (group == "cech") {
    auto l = io::load(o.form);
    r.input(l);
    with_scalar(l.doc, [&](auto tag) { run_cech<decltype(tag)>(sub, l.doc, o, r); });
  } else if (group == "lck") {
    auto l = io::load(o.lck);
    r.input(l);
    with_scalar(l.doc, [&](auto tag) { run_lck<decltype(tag)>(sub, l.doc, o, r); });
  } else if (sub == "hessian" || sub == "check") {
    psh_grid(sub, o, r);
  } else {
    psh_spec(sub, o, r);
  }
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Čech forms, LCK structures and plurisubharmonic gluing on desk-scale models"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "Print the machine-readable report");
  app.add_option("--seed", o.seed, "Seed for randomized searches");
  app.add_option("--tol", o.tol, "Tolerance for floating comparisons");
  app.add_option("--radius", o.radius, "Word radius for truncated universal covers")->check(CLI::NonNegativeNumber);

  std::string group, sub;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    auto* s = parent->add_subcommand(name, help);
    s->callback([&, parent, name] {
      group = parent->get_name();
      sub = name;
    });
    return s;
  };

  auto* cech = app.add_subcommand("cech", "Closed 1-forms as Čech cochains of local potentials");
  cech->require_subcommand(1);
  for (auto [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"integrate", "Integrate along an edge path"},
           {"monodromy", "Period character on the edge-path group"},
           {"exact", "Decide exactness, printing a witness loop otherwise"},
           {"primitive", "Global primitive on a simply connected complex"},
           {"pullback", "Pull back to the universal cover"}}) {
    auto* s = leaf(cech, name, help);
    s->add_option("--form", o.form, "Form JSON")->required();
    s->add_option("--basepoint", o.basepoint, "Basepoint vertex");
    if (name == "integrate") s->add_option("--path", o.path, "Comma-separated vertices")->required();
    if (name == "monodromy") s->add_option("--loop", o.loops, "Closed path to integrate (repeatable)");
    if (name == "pullback") s->add_option("--out", o.out, "Write the pulled-back form here");
  }

  auto* lck = app.add_subcommand("lck", "Locally conformally Kähler data");
  lck->require_subcommand(1);
  for (auto [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"lee", "Lee form and its periods"},
           {"gck", "Globally conformally Kähler test"},
           {"lift", "Kähler data on the universal cover"},
           {"descend", "Lift and descend back to LCK data"},
           {"roundtrip", "Lift, check homotheties, descend and compare"},
           {"character", "Homothety character of the lift"}}) {
    auto* s = leaf(lck, name, help);
    s->add_option("--lck", o.lck, "LCK JSON")->required();
    s->add_option("--basepoint", o.basepoint, "Basepoint vertex");
  }

  auto* psh = app.add_subcommand("psh", "Plurisubharmonic potentials on grids");
  psh->require_subcommand(1);
  for (auto [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"hessian", "Complex Hessian of a sampled function"},
           {"check", "Strong plurisubharmonicity (or pluriharmonicity) of a sampled function"},
           {"wellrelated", "Validate a covering specification"},
           {"plan", "Levi constants and the ε schedule"},
           {"glue", "Glue the potentials with the planned ε"},
           {"verify", "Glue and verify strong plurisubharmonicity"},
           {"pipeline", "Validate, plan, glue and verify, halving ε as needed"}}) {
    auto* s = leaf(psh, name, help);
    if (name == "hessian" || name == "check") {
      s->add_option("--grid", o.grid, "Grid JSON")->required();
      s->add_option("--region", o.region, "Region JSON (default: whole interior)");
      if (name == "hessian") s->add_option("--point", o.point, "re,im[,re,im]: report at the nearest node");
      if (name == "check") {
        s->add_option("--margin", o.margin, "Required smallest eigenvalue");
        s->add_flag("--pluriharmonic", o.pluriharmonic, "Check the Hessian vanishes (within --tol)");
      }
    } else {
      s->add_option("--spec", o.spec, "Covering specification JSON")->required();
      if (name != "wellrelated" && name != "plan") s->add_option("--epsilon", o.epsilon, "Override ε (one value or one per chart)");
      if (name == "glue") s->add_option("--out", o.out, "Write the glued grids here");
      if (name == "verify" || name == "pipeline") s->add_option("--margin", o.margin, "Required smallest eigenvalue");
    }
  }

  Report r;
  for (int i = 1; i < argc; ++i) r.command += (i > 1 ? " " : "") + std::string(argv[i]);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    run(group, sub, o, r);
  } catch (const InvalidInput& e) {
    r.input_error = true;
    r.add("input", false, e.what(), json{{"stage", r.stage}, {"error", e.what()}});
  } catch (const json::exception& e) {
    r.input_error = true;
    r.add("input", false, e.what(), json{{"stage", r.stage}, {"error", e.what()}});
  } catch (const Error& e) {
    r.add(r.stage.empty() ? "run" : r.stage, false, e.what(), json{{"stage", r.stage}, {"error", e.what()}});
  } catch (const std::exception& e) {
    r.input_error = true;
    r.add("input", false, e.what(), json{{"stage", r.stage}, {"error", e.what()}});
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (o.json)
    std::cout << r.to_json().dump(2) << "\n";
  else
    r.print_human(std::cout, seconds);
  return r.exit_code();
}
