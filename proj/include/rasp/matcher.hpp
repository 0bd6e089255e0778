#pragma once

#include "rasp/model.hpp"

namespace rasp {

/// One concrete embedding of a pattern in a sequence.
struct Occurrence {
  int seq;                  // index into the database vector
  std::vector<int> lambda;  // 1-based strictly increasing event ordinals
  auto operator<=>(const Occurrence&) const = default;
};

/// Event-type counts of a pattern or sequence.
struct TypeMultiset {
  std::vector<int> counts;  // indexed by event type id
};

TypeMultiset type_multiset(int n_types, const std::vector<int>& event_types);

/// True (prune) iff the pattern needs more events of some type than the
/// sequence has.
bool multiset_prune(const TypeMultiset& m_seq, const TypeMultiset& m_pat);

/// All lambda vectors embedding `pat` in `seq` at type level: equal types,
/// transaction-separation agreement, consecutive gaps <= mg, span <= mpl.
/// Output is in lexicographic order, each lambda exactly once. Depth-first
/// with an explicit stack; scans abort early on gap/span overrun, on a
/// sequence separator the pattern lacks, and when the remaining events cannot
/// supply the pattern's remaining type counts.
std::vector<std::vector<int>> find_all_occurrences(const TypePattern& pat, const Sequence& seq,
                                                   int mg, int mpl);

/// Analytic estimate of how many occurrences a k-event pattern can have in an
/// n-event sequence: min of C(n,k), (g-1)^(k-1)*(n-k) for finite max-gap g,
/// and C(w,k-1)*(n-k) for finite max projected length w. Heuristic only (it
/// undercuts for small g); saturates instead of overflowing. Never used to
/// limit enumeration.
unsigned long long count_occurrences_bound(int n, int k, int g, int w);

}  // namespace rasp
