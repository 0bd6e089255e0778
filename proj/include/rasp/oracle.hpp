#pragma once

#include "rasp/model.hpp"

namespace rasp::oracle {

/// Reference-miner configuration. The oracle is deliberately slow and simple;
/// inputs beyond desk scale are rejected up front.
struct OracleConfig {
  int theta = 1;
  int mg = kInf;
  int mpl = kInf;
  int max_pattern_events = 3;  // <= 4
  bool relationship_only = false;
};

/// Every strictly increasing lambda embedding `pat` in `seq` at type level,
/// by exhaustive enumeration of index combinations — no pruning, no shared
/// code with the production matcher. Lexicographic order.
std::vector<std::vector<int>> naive_all_occurrences(const TypePattern& pat, const Sequence& seq,
                                                    int mg, int mpl);

/// Reference implementation of the whole pipeline: enumerate all canonical
/// type-patterns, keep the frequent ones, enumerate concept assignments over
/// their slots (depth-first over the full per-slot concept range, cutting a
/// branch only when the partial assignment is already infrequent — every
/// completion of it is at most as frequent), then keep the maximal frequent
/// assignments per type-pattern. Supports are sequence counts via the plain
/// matching predicate.
std::vector<std::pair<RefinedPattern, int>> brute_force_mine(const std::vector<Sequence>& db,
                                                             const Schema& schema,
                                                             const OracleConfig& cfg);

}  // namespace rasp::oracle
