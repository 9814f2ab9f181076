#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcktk/complex.hpp"

namespace lcktk {

/// Generator i is the letter i+1, its inverse is -(i+1).
using Letter = int;
using Word = std::vector<Letter>;

Word free_reduce(Word w);
Word cyclic_reduce(Word w);
Word inverse(const Word& w);
Word concat(Word a, const Word& b);
std::string to_string(const Word& w);

struct Presentation {
  int generators = 0;
  std::vector<Word> relators;
};

/// Presentation after Tietze eliminations, with each original generator
/// rewritten as a word in the surviving generators.
struct TietzeResult {
  Presentation presentation;
  std::vector<Word> images;

  Word rewrite(const Word& original) const;
};

/// Repeatedly eliminates a generator occurring exactly once in some relator,
/// drops trivial relators and duplicates.
TietzeResult simplify(const Presentation& p);

/// Abelianized relator matrix (one row per relator, one column per generator).
std::vector<std::vector<long long>> relation_matrix(const Presentation& p);

struct EnumerationLimits {
  std::size_t max_cosets = 50000;
  /// When set, new cosets are defined only from cosets of depth below this bound.
  std::optional<int> max_depth;
};

/// Coset table for the trivial subgroup: cosets are group elements.
/// Column 2i is generator i, column 2i+1 its inverse; -1 marks an undefined entry.
struct CosetTable {
  int generators = 0;
  std::vector<std::vector<int>> rows;
  bool complete = false;

  int size() const { return static_cast<int>(rows.size()); }
  std::optional<int> act(int coset, Letter x) const;
  /// Follows the word from `coset`; empty if some entry is undefined.
  std::optional<int> trace(int coset, const Word& w) const;
  /// Breadth-first distance from coset 0 in the Cayley graph (-1 when unreachable).
  std::vector<int> distances() const;
  /// Shortest word reaching each coset from coset 0 (breadth-first, column order).
  std::vector<Word> representatives() const;
};

/// Hasse–Low–Todd–Coxeter enumeration with coincidence handling. The result is
/// compacted and standardized (breadth-first numbering from the identity).
/// `complete` is true iff every entry is defined and no limit was hit.
CosetTable enumerate_cosets(const Presentation& p, const EnumerationLimits& limits = {});

/// Edge-path presentation of the fundamental group of a connected complex.
///
/// The spanning tree is breadth-first from the basepoint with ascending
/// neighbour order. Generators are the non-tree edges, oriented from the lower
/// to the higher vertex index; relators are triangle boundaries read through the tree.
class PresentedGroup {
 public:
  PresentedGroup(ComplexPtr complex, VertexId basepoint);

  const ComplexPtr& complex() const { return complex_; }
  VertexId basepoint() const { return basepoint_; }
  const Presentation& presentation() const { return presentation_; }
  int generator_count() const { return presentation_.generators; }
  const TietzeResult& simplified() const { return simplified_; }

  /// Edge index carrying generator g.
  int generator_edge(int g) const { return generator_edges_[g]; }
  /// Generator carried by the edge, or -1 for tree edges.
  int edge_generator(int edge) const { return edge_generators_[edge]; }
  VertexId tree_parent(VertexId v) const { return tree_parent_[v]; }

  /// Word read when walking the edge from -> to.
  Word edge_word(VertexId from, VertexId to) const;
  Word path_word(const EdgePath& path) const;
  /// Tree path from the basepoint to v.
  EdgePath tree_path(VertexId v) const;
  /// Basepoint -> tree -> u -> v -> tree -> basepoint for the generator's edge (u < v).
  EdgePath generator_loop(int g) const;
  /// Loop at the basepoint reading the given word.
  EdgePath word_loop(const Word& w) const;

 private:
  ComplexPtr complex_;
  VertexId basepoint_;
  Presentation presentation_;
  TietzeResult simplified_;
  std::vector<int> generator_edges_;
  std::vector<int> edge_generators_;
  std::vector<VertexId> tree_parent_;
};

using GroupPtr = std::shared_ptr<const PresentedGroup>;

/// Throws PreconditionFailed naming two non-connected vertices when the complex is disconnected.
GroupPtr edge_path_group(const ComplexPtr& complex, VertexId basepoint = 0);

/// True iff bounded coset enumeration proves the group trivial.
bool is_trivial_group(const PresentedGroup& group, const EnumerationLimits& limits = {});

/// A generator whose class is not proved trivial by bounded enumeration (-1 if the group is trivial).
int nontrivial_generator(const PresentedGroup& group, const EnumerationLimits& limits = {});

}  // namespace lcktk
