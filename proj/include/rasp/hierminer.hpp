#pragma once

#include "rasp/typeminer.hpp"

namespace rasp {

/// One mineable item: a non-root concept attached to a slot of the flattened
/// representation of a type-pattern.
struct VocabItem {
  int concept_id;
  int slot;
  auto operator<=>(const VocabItem&) const = default;
};

/// The items an occurrence set can mention, sorted by (slot, concept id).
/// Root concepts never appear: they carry no information.
struct Vocabulary {
  SlotLayout layout;
  std::vector<VocabItem> items;

  int n_items() const { return static_cast<int>(items.size()); }
  /// Ordinal of (concept, slot), or -1 when absent.
  int ordinal_of(int concept_id, int slot) const;
};

/// Vertical occurrence-by-item incidence: for each vocabulary item the
/// ascending row ids containing it, plus the row -> sequence map. Rows are
/// ordered exactly like the source pattern's occurrence list, so seq_of_row
/// is non-decreasing.
struct OccurrenceMatrix {
  int n_rows = 0;
  std::vector<std::vector<int>> item_rows;
  std::vector<int> seq_of_row;
};

/// Refinements of one type-pattern, each with its sequence-level support.
/// When no single item is frequent the sole entry is the all-root refinement
/// carrying the type-pattern's own support.
struct RefinementResult {
  TypePattern base;
  std::vector<std::pair<RefinedPattern, int>> refinements;
};

/// Collects (ancestor concept, slot) pairs over every occurrence of `ftp`,
/// excluding taxonomy roots. With relationship_only, event-concept slots are
/// skipped so only relationship slots can specialize.
Vocabulary build_vocabulary(const Schema& schema, const std::vector<Sequence>& db,
                            const FrequentTypePattern& ftp, bool relationship_only);

/// Row r contains item (c, j) iff c is a non-root ancestor-or-self of the
/// concept at slot j of occurrence r's flattened projection.
OccurrenceMatrix build_occurrence_matrix(const Schema& schema, const std::vector<Sequence>& db,
                                         const FrequentTypePattern& ftp, const Vocabulary& vocab);

/// Number of distinct sequences among `rows`. Requires ascending rows and
/// non-decreasing seq_of_row (the matrix invariant).
int sequence_support(const std::vector<int>& rows, const std::vector<int>& seq_of_row);

/// All maximal itemsets (ascending item ordinals) whose intersected rows span
/// at least `theta` distinct sequences. Maximal: no frequent proper superset.
/// Depth-first search in vocabulary order over row-set intersections; no
/// support-equality shortcuts. Output sorted lexicographically.
std::vector<std::vector<int>> mine_maximal_refinements(const OccurrenceMatrix& matrix,
                                                       const Vocabulary& vocab, int theta);

/// Fills each slot with the deepest concept the itemset names for it (root
/// when unnamed). Throws std::domain_error if an itemset carries incomparable
/// concepts for one slot, which a correctly built matrix cannot produce.
RefinedPattern itemset_to_pattern(const std::vector<int>& itemset, const FrequentTypePattern& ftp,
                                  const Vocabulary& vocab, const Schema& schema);

/// Runs the vocabulary/matrix/mining pipeline for every type-pattern, in
/// order. Type-patterns are independent and processed in parallel when
/// threads > 1; output order does not depend on thread count.
std::vector<RefinementResult> refine_all(const std::vector<FrequentTypePattern>& ftps,
                                         const std::vector<Sequence>& db, const Schema& schema,
                                         int theta, bool relationship_only, int threads = 1);

}  // namespace rasp
