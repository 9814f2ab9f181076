#pragma once

#include <optional>
#include <vector>

#include "lcktk/complex.hpp"
#include "lcktk/group.hpp"

namespace lcktk {

/// Covering projection from a (possibly truncated) total complex onto a base.
///
/// Total vertex ids are `sheet * n + v` for base vertex v, where sheets are
/// group elements (cosets of the trivial subgroup) numbered breadth-first from
/// the identity. Words passed in are in the generators of the base's
/// edge-path group.
class CoveringMap {
 public:
  /// Empty placeholder; real coverings come from universal_cover / identity_cover.
  CoveringMap() = default;

  const ComplexPtr& total() const { return total_; }
  const ComplexPtr& base() const { return group_->complex(); }
  const GroupPtr& group() const { return group_; }

  /// True when the deck group is infinite (or too large) and only a word ball was built.
  bool truncated() const { return truncated_; }
  /// Word-length bound of the materialized region; -1 when the cover is complete.
  int radius() const { return truncated_ ? radius_ : -1; }
  int sheet_count() const { return sheets_; }
  /// True when the deck group is the full edge-path group, i.e. this is a universal cover.
  bool universal() const { return universal_; }

  VertexId project(VertexId x) const { return x % n_; }
  int sheet_of(VertexId x) const { return x / n_; }
  VertexId lift(VertexId v, int sheet) const { return sheet * n_ + v; }
  VertexId basepoint_lift() const { return lift(group_->basepoint(), 0); }
  int project_edge(int e) const { return edge_projection_[e]; }
  int project_triangle(int t) const { return triangle_projection_[t]; }

  /// Shortest word (in the simplified presentation) labelling the sheet.
  const Word& sheet_word(int sheet) const { return sheet_words_[sheet]; }
  /// Sheet reached from the identity by the word; empty when it leaves the region.
  std::optional<int> sheet_of_word(const Word& g) const;

  /// Throws TruncationError when the image leaves the materialized region.
  VertexId deck_vertex(const Word& g, VertexId x) const;
  int deck_edge(const Word& g, int edge) const;
  int deck_triangle(const Word& g, int tri) const;
  /// Vertex permutation of a generator; -1 where the image is not materialized.
  std::vector<VertexId> deck_permutation(int generator) const;

  /// Full preimage of a base subcomplex inside the materialized region.
  Subcomplex preimage(const Subcomplex& chart) const;
  /// Unique lift starting at `start`; throws TruncationError when it leaves the region.
  EdgePath lift_path(const EdgePath& path, VertexId start) const;

  friend CoveringMap universal_cover(const ComplexPtr&, std::optional<int>, VertexId, const EnumerationLimits&);
  friend CoveringMap identity_cover(const ComplexPtr&, VertexId);

 private:
  void materialize();
  std::optional<int> act(int sheet, const Word& simplified_word) const;

  GroupPtr group_;
  CosetTable table_;
  int n_ = 0;
  int sheets_ = 0;
  int radius_ = 0;
  bool truncated_ = false;
  bool universal_ = false;
  ComplexPtr total_;
  std::vector<Word> sheet_words_;
  std::vector<int> edge_projection_;
  std::vector<int> triangle_projection_;
};

/// Universal cover of a connected complex. Finite deck groups are enumerated
/// completely and `radius` is ignored; otherwise `radius` is required and the
/// cover is materialized over words of length <= radius. Throws
/// PreconditionFailed for a radius-0 request on a nontrivial group.
CoveringMap universal_cover(const ComplexPtr& complex, std::optional<int> radius = std::nullopt,
                            VertexId basepoint = 0, const EnumerationLimits& limits = {20000, std::nullopt});

/// The trivial covering X -> X (one sheet, every word acts as the identity).
CoveringMap identity_cover(const ComplexPtr& complex, VertexId basepoint = 0);

}  // namespace lcktk
