#include "lcktk/group.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "lcktk/errors.hpp"

namespace lcktk {

Word free_reduce(Word w) {
  Word out;
  out.reserve(w.size());
  for (Letter x : w) {
    if (!out.empty() && out.back() == -x) out.pop_back();
    else out.push_back(x);
  }
  return out;
}

Word cyclic_reduce(Word w) {
  w = free_reduce(std::move(w));
  std::size_t i = 0, j = w.size();
  while (j - i >= 2 && w[i] == -w[j - 1]) {
    ++i;
    --j;
  }
  return Word(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(j));
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& x : out) x = -x;
  return out;
}

Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return free_reduce(std::move(a));
}

std::string to_string(const Word& w) {
  if (w.empty()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << " ";
    os << "g" << (std::abs(w[i]) - 1);
    if (w[i] < 0) os << "^-1";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

Word TietzeResult::rewrite(const Word& original) const {
  Word out;
  for (Letter x : original) {
    const Word& img = images[std::abs(x) - 1];
    if (x > 0) out.insert(out.end(), img.begin(), img.end());
    else {
      Word inv = inverse(img);
      out.insert(out.end(), inv.begin(), inv.end());
    }
  }
  return free_reduce(std::move(out));
}

namespace {

Word substitute(const Word& w, int gen, const Word& replacement) {
  Word out;
  Word inv = inverse(replacement);
  for (Letter x : w) {
    if (std::abs(x) == gen + 1) {
      const Word& r = x > 0 ? replacement : inv;
      out.insert(out.end(), r.begin(), r.end());
    } else {
      int g = std::abs(x) - 1;
      int ng = g > gen ? g - 1 : g;
      out.push_back(x > 0 ? ng + 1 : -(ng + 1));
    }
  }
  return free_reduce(std::move(out));
}

void normalize_relators(std::vector<Word>& rels) {
  for (auto& r : rels) r = cyclic_reduce(std::move(r));
  rels.erase(std::remove_if(rels.begin(), rels.end(), [](const Word& r) { return r.empty(); }), rels.end());
  std::vector<Word> uniq;
  for (auto& r : rels)
    if (std::find(uniq.begin(), uniq.end(), r) == uniq.end() &&
        std::find(uniq.begin(), uniq.end(), cyclic_reduce(inverse(r))) == uniq.end())
      uniq.push_back(std::move(r));
  rels = std::move(uniq);
}

}  // namespace

TietzeResult simplify(const Presentation& p) {
  TietzeResult res;
  res.presentation = p;
  res.images.resize(p.generators);
  for (int i = 0; i < p.generators; ++i) res.images[i] = {i + 1};
  auto& cur = res.presentation;

  while (true) {
    normalize_relators(cur.relators);
    int best_rel = -1, best_gen = -1;
    std::size_t best_len = 0;
    for (int r = 0; r < static_cast<int>(cur.relators.size()); ++r) {
      const auto& rel = cur.relators[r];
      if (best_rel >= 0 && rel.size() >= best_len) continue;
      std::vector<int> count(cur.generators, 0);
      for (Letter x : rel) ++count[std::abs(x) - 1];
      for (int g = 0; g < cur.generators; ++g)
        if (count[g] == 1) {
          best_rel = r;
          best_gen = g;
          best_len = rel.size();
          break;
        }
    }
    if (best_rel < 0) break;

    Word rel = cur.relators[best_rel];
    auto pos = std::find_if(rel.begin(), rel.end(), [&](Letter x) { return std::abs(x) == best_gen + 1; });
    std::rotate(rel.begin(), pos, rel.end());
    Letter head = rel.front();
    Word rest(rel.begin() + 1, rel.end());
    // head * rest = 1, so head = rest^-1.
    Word value = head > 0 ? inverse(rest) : rest;
    // value is expressed with the old numbering; renumber past the eliminated generator.
    Word renumbered;
    for (Letter x : value) {
      int g = std::abs(x) - 1;
      int ng = g > best_gen ? g - 1 : g;
      renumbered.push_back(x > 0 ? ng + 1 : -(ng + 1));
    }
    cur.relators.erase(cur.relators.begin() + best_rel);
    for (auto& r : cur.relators) r = substitute(r, best_gen, renumbered);
    for (auto& img : res.images) img = substitute(img, best_gen, renumbered);
    --cur.generators;
  }
  return res;
}

std::vector<std::vector<long long>> relation_matrix(const Presentation& p) {
  std::vector<std::vector<long long>> m(p.relators.size(), std::vector<long long>(p.generators, 0));
  for (std::size_t r = 0; r < p.relators.size(); ++r)
    for (Letter x : p.relators[r]) m[r][std::abs(x) - 1] += x > 0 ? 1 : -1;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

int column(Letter x) { return x > 0 ? 2 * (x - 1) : 2 * (-x - 1) + 1; }

class Enumerator {
 public:
  Enumerator(const Presentation& p, const EnumerationLimits& lim) : ncols_(2 * p.generators), limits_(lim) {
    for (const auto& r : p.relators) {
      std::vector<int> cols;
      for (Letter x : r) cols.push_back(column(x));
      rels_.push_back(std::move(cols));
    }
    new_coset(0);
  }

  CosetTable run() {
    for (std::size_t c = 0; c < table_.size() && !overflow_; ++c) {
      if (!alive(static_cast<int>(c))) continue;
      for (const auto& r : rels_) {
        scan_and_fill(static_cast<int>(c), r, true);
        if (!alive(static_cast<int>(c)) || overflow_) break;
      }
      if (!alive(static_cast<int>(c)) || overflow_) continue;
      for (int col = 0; col < ncols_ && !overflow_; ++col)
        if (table_[c][col] < 0) define(static_cast<int>(c), col);
    }
    if (!overflow_ && blocked_) {
      // Bounded mode: harvest deductions from relators that close without new cosets.
      for (int pass = 0; pass < 32; ++pass) {
        changed_ = false;
        for (std::size_t c = 0; c < table_.size(); ++c) {
          if (!alive(static_cast<int>(c))) continue;
          for (const auto& r : rels_) {
            if (!alive(static_cast<int>(c))) break;
            scan_and_fill(static_cast<int>(c), r, false);
          }
        }
        if (!changed_) break;
      }
    }
    return compact();
  }

 private:
  int new_coset(int depth) {
    table_.emplace_back(ncols_, -1);
    parent_.push_back(static_cast<int>(parent_.size()));
    depth_.push_back(depth);
    return static_cast<int>(table_.size()) - 1;
  }

  bool alive(int c) const { return parent_[c] == c; }

  int rep(int c) {
    int r = c;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[c] != r) {
      int n = parent_[c];
      parent_[c] = r;
      c = n;
    }
    return r;
  }

  bool define(int c, int col) {
    if (table_.size() >= limits_.max_cosets) {
      overflow_ = true;
      return false;
    }
    if (limits_.max_depth && depth_dirty_) refresh_depths();
    if (limits_.max_depth && depth_[c] >= *limits_.max_depth) {
      blocked_ = true;
      return false;
    }
    int d = new_coset(depth_[c] + 1);
    table_[c][col] = d;
    table_[d][col ^ 1] = c;
    return true;
  }

  // Definition depth overestimates distance once deductions close relator
  // cycles, so bounded mode recomputes breadth-first distances on demand.
  void refresh_depths() {
    std::fill(depth_.begin(), depth_.end(), std::numeric_limits<int>::max() / 2);
    int root = rep(0);
    depth_[root] = 0;
    std::deque<int> q{root};
    while (!q.empty()) {
      int c = q.front();
      q.pop_front();
      for (int d : table_[c])
        if (d >= 0 && alive(d) && depth_[d] > depth_[c] + 1) {
          depth_[d] = depth_[c] + 1;
          q.push_back(d);
        }
    }
    depth_dirty_ = false;
  }

  void merge(int a, int b, std::vector<int>& queue) {
    a = rep(a);
    b = rep(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    depth_[a] = std::min(depth_[a], depth_[b]);
    queue.push_back(b);
  }

  void coincidence(int a, int b) {
    changed_ = true;
    depth_dirty_ = true;
    std::vector<int> queue;
    merge(a, b, queue);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int g = queue[i];
      for (int col = 0; col < ncols_; ++col) {
        int d = table_[g][col];
        if (d < 0) continue;
        table_[d][col ^ 1] = -1;
        int mu = rep(g), nu = rep(d);
        if (table_[mu][col] >= 0) merge(nu, table_[mu][col], queue);
        else if (table_[nu][col ^ 1] >= 0) merge(mu, table_[nu][col ^ 1], queue);
        else {
          table_[mu][col] = nu;
          table_[nu][col ^ 1] = mu;
        }
      }
    }
  }

  void scan_and_fill(int c, const std::vector<int>& w, bool may_define) {
    int f = c, b = c;
    int i = 0, j = static_cast<int>(w.size()) - 1;
    while (true) {
      while (i <= j && table_[f][w[i]] >= 0) f = table_[f][w[i++]];
      if (i > j) {
        if (f != c) coincidence(f, c);
        return;
      }
      while (j >= i && table_[b][w[j] ^ 1] >= 0) b = table_[b][w[j--] ^ 1];
      if (j < i) {
        coincidence(f, b);
        return;
      }
      if (i == j) {
        table_[f][w[i]] = b;
        table_[b][w[i] ^ 1] = f;
        changed_ = true;
        depth_dirty_ = true;
        return;
      }
      if (!may_define || !define(f, w[i])) return;
    }
  }

  CosetTable compact() {
    CosetTable out;
    out.generators = ncols_ / 2;
    std::vector<int> index(table_.size(), -1);
    std::vector<int> order;
    int root = rep(0);
    index[root] = 0;
    order.push_back(root);
    for (std::size_t q = 0; q < order.size(); ++q)
      for (int col = 0; col < ncols_; ++col) {
        int d = table_[order[q]][col];
        if (d < 0) continue;
        d = rep(d);
        if (index[d] < 0) {
          index[d] = static_cast<int>(order.size());
          order.push_back(d);
        }
      }
    out.rows.assign(order.size(), std::vector<int>(ncols_, -1));
    bool full = true;
    for (std::size_t q = 0; q < order.size(); ++q)
      for (int col = 0; col < ncols_; ++col) {
        int d = table_[order[q]][col];
        if (d < 0) full = false;
        else out.rows[q][col] = index[rep(d)];
      }
    out.complete = full && !overflow_ && !blocked_;
    return out;
  }

  int ncols_;
  EnumerationLimits limits_;
  std::vector<std::vector<int>> rels_;
  std::vector<std::vector<int>> table_;
  std::vector<int> parent_;
  std::vector<int> depth_;
  bool overflow_ = false;
  bool blocked_ = false;
  bool changed_ = false;
  bool depth_dirty_ = false;
};

}  // namespace

CosetTable enumerate_cosets(const Presentation& p, const EnumerationLimits& limits) {
  if (p.generators == 0) {
    CosetTable t;
    t.rows.assign(1, {});
    t.complete = true;
    return t;
  }
  return Enumerator(p, limits).run();
}

std::optional<int> CosetTable::act(int coset, Letter x) const {
  int d = rows[coset][column(x)];
  if (d < 0) return std::nullopt;
  return d;
}

std::optional<int> CosetTable::trace(int coset, const Word& w) const {
  int c = coset;
  for (Letter x : w) {
    auto n = act(c, x);
    if (!n) return std::nullopt;
    c = *n;
  }
  return c;
}

std::vector<int> CosetTable::distances() const {
  std::vector<int> dist(rows.size(), -1);
  if (rows.empty()) return dist;
  std::deque<int> q{0};
  dist[0] = 0;
  while (!q.empty()) {
    int c = q.front();
    q.pop_front();
    for (int d : rows[c])
      if (d >= 0 && dist[d] < 0) {
        dist[d] = dist[c] + 1;
        q.push_back(d);
      }
  }
  return dist;
}

std::vector<Word> CosetTable::representatives() const {
  std::vector<Word> reps(rows.size());
  std::vector<char> seen(rows.size(), 0);
  if (rows.empty()) return reps;
  std::deque<int> q{0};
  seen[0] = 1;
  while (!q.empty()) {
    int c = q.front();
    q.pop_front();
    for (int col = 0; col < static_cast<int>(rows[c].size()); ++col) {
      int d = rows[c][col];
      if (d < 0 || seen[d]) continue;
      seen[d] = 1;
      reps[d] = reps[c];
      reps[d].push_back(col % 2 == 0 ? col / 2 + 1 : -(col / 2 + 1));
      q.push_back(d);
    }
  }
  return reps;
}

// ---------------------------------------------------------------------------

PresentedGroup::PresentedGroup(ComplexPtr complex, VertexId basepoint)
    : complex_(std::move(complex)), basepoint_(basepoint) {
  const auto& K = *complex_;
  if (basepoint < 0 || basepoint >= K.vertex_count()) throw InvalidInput("basepoint out of range");
  tree_parent_.assign(K.vertex_count(), -2);
  tree_parent_[basepoint] = -1;
  std::vector<char> tree_edge(K.edges().size(), 0);
  std::deque<VertexId> q{basepoint};
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    for (auto w : K.neighbors(v))
      if (tree_parent_[w] == -2) {
        tree_parent_[w] = v;
        tree_edge[*K.edge_index(v, w)] = 1;
        q.push_back(w);
      }
  }
  for (VertexId v = 0; v < K.vertex_count(); ++v)
    if (tree_parent_[v] == -2)
      throw PreconditionFailed("complex is not connected: no edge path joins vertices " + std::to_string(basepoint) +
                               " and " + std::to_string(v));

  edge_generators_.assign(K.edges().size(), -1);
  for (int e = 0; e < static_cast<int>(K.edges().size()); ++e)
    if (!tree_edge[e]) {
      edge_generators_[e] = static_cast<int>(generator_edges_.size());
      generator_edges_.push_back(e);
    }
  presentation_.generators = static_cast<int>(generator_edges_.size());
  for (const auto& t : K.triangles()) {
    Word w = edge_word(t.a, t.b);
    for (Letter x : edge_word(t.b, t.c)) w.push_back(x);
    for (Letter x : edge_word(t.c, t.a)) w.push_back(x);
    w = free_reduce(std::move(w));
    if (!w.empty()) presentation_.relators.push_back(std::move(w));
  }
  simplified_ = simplify(presentation_);
}

Word PresentedGroup::edge_word(VertexId from, VertexId to) const {
  auto e = complex_->edge_index(from, to);
  if (!e) throw InvalidInput("no edge {" + std::to_string(from) + "," + std::to_string(to) + "}");
  int g = edge_generators_[*e];
  if (g < 0) return {};
  return {from < to ? g + 1 : -(g + 1)};
}

Word PresentedGroup::path_word(const EdgePath& path) const {
  Word w;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
    for (Letter x : edge_word(path.vertices[i], path.vertices[i + 1])) w.push_back(x);
  return free_reduce(std::move(w));
}

EdgePath PresentedGroup::tree_path(VertexId v) const {
  EdgePath p;
  for (VertexId x = v; x != -1; x = tree_parent_[x]) p.vertices.push_back(x);
  std::reverse(p.vertices.begin(), p.vertices.end());
  return p;
}

EdgePath PresentedGroup::generator_loop(int g) const {
  const auto& e = complex_->edges()[generator_edges_.at(g)];
  EdgePath to_a = tree_path(e.a);
  EdgePath hop{{e.a, e.b}};
  return to_a.then(hop).then(tree_path(e.b).reversed());
}

EdgePath PresentedGroup::word_loop(const Word& w) const {
  EdgePath p{{basepoint_}};
  for (Letter x : w) {
    EdgePath l = generator_loop(std::abs(x) - 1);
    p = p.then(x > 0 ? l : l.reversed());
  }
  return p;
}

GroupPtr edge_path_group(const ComplexPtr& complex, VertexId basepoint) {
  return std::make_shared<const PresentedGroup>(complex, basepoint);
}

bool is_trivial_group(const PresentedGroup& group, const EnumerationLimits& limits) {
  const auto& s = group.simplified().presentation;
  if (s.generators == 0) return true;
  auto t = enumerate_cosets(s, limits);
  return t.complete && t.size() == 1;
}

int nontrivial_generator(const PresentedGroup& group, const EnumerationLimits& limits) {
  if (is_trivial_group(group, limits)) return -1;
  const auto& simp = group.simplified();
  auto t = enumerate_cosets(simp.presentation, limits);
  for (int g = 0; g < group.generator_count(); ++g) {
    Word img = simp.rewrite({g + 1});
    if (t.complete) {
      if (t.trace(0, img) != 0) return g;
    } else if (!img.empty()) {
      return g;
    }
  }
  return 0;
}

}  // namespace lcktk
