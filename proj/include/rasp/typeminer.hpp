#pragma once

#include "rasp/matcher.hpp"

namespace rasp {

struct MinerConfig {
  int theta = 1;               // minimum support, absolute sequence count
  int mg = kInf;               // max gap between consecutive matched ordinals
  int mpl = kInf;              // max span of a match, in event ordinals
  int max_pattern_events = 10;
  int occ_cap = 0;             // per-sequence occurrence cap; 0 = unlimited
  bool ban_uniform_runs = false;
  int threads = 1;
};

struct FrequentTypePattern {
  TypePattern pattern;
  std::vector<Occurrence> occurrences;  // sorted by (sequence index, lambda)
  std::vector<int> supporting_seqs;     // distinct sequence indices, ascending
  int support = 0;
  bool truncated = false;  // occ_cap dropped occurrences of this pattern
};

struct TypeMineResult {
  std::vector<FrequentTypePattern> patterns;  // sorted by (event count, text)
  bool complete = true;                       // false when any truncation happened
};

/// Pattern minus its last event (transaction structure re-normalized).
TypePattern head_pattern(const TypePattern& pat);
/// Pattern minus its first event.
TypePattern tail_pattern(const TypePattern& pat);
/// Pattern minus event i (0-based); a separator left with an empty transaction
/// collapses. Deletion keeps within-transaction canonical order.
TypePattern delete_event(const TypePattern& pat, int i);

/// One single-event pattern per declared event type.
std::vector<TypePattern> level1_candidates(const Schema& schema);

/// Classic GSP join of the frequent (k-1)-patterns. When the inputs are
/// single events: every ordered pair (x,y) gives <x ; y>, and <x y> is added
/// for x <= y in name order (the other transaction order is non-canonical and
/// can never match). Otherwise A joins B when tail(A) == head(B), appending
/// B's last event in B's transaction relation. Output is deduplicated and in
/// deterministic order.
std::vector<TypePattern> join_candidates(const Schema& schema,
                                         const std::vector<TypePattern>& frequent_k_minus_1);

/// Apriori pruning: with no gap bound every single-event-deletion subpattern
/// must be frequent; with a finite gap bound only head and tail are consulted
/// (dropping a middle event can widen a gap, so middle subpatterns may be
/// legitimately infrequent). ban_uniform_runs additionally drops candidates of
/// 3+ events that all share one type.
std::vector<TypePattern> prune_candidates(std::vector<TypePattern> candidates,
                                          const std::vector<TypePattern>& frequent_k_minus_1,
                                          const MinerConfig& cfg);

/// Level-wise mining of every type-pattern with support >= theta under the
/// configured constraints, each with its complete (or capped) occurrence set.
/// Candidates are only checked against sequences supporting both their head
/// and tail parent patterns.
TypeMineResult mine_type_patterns(const std::vector<Sequence>& db, const Schema& schema,
                                  const MinerConfig& cfg);

}  // namespace rasp
