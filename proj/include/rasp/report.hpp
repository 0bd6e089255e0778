#pragma once

#include <string>
#include <vector>

#include "rasp/hierminer.hpp"

namespace rasp {

/// Threshold from the --min-support text over a database of n_sequences.
/// Text containing a decimal point is a fraction f with theta = ceil(f * n),
/// evaluated in exact integer arithmetic (no floating point); otherwise the
/// text is an absolute count. Throws ParseError on malformed text.
int resolve_min_support(const std::string& text, int n_sequences);

/// support/total with four decimals, round half up, e.g. "0.0450".
std::string format_fraction(int support, int total);

/// One line per refined pattern:
///   <support count> TAB <fraction, 4 decimals> TAB <pattern display form>
/// sorted by (event count, pattern text). Empty string when nothing was mined.
std::string format_pattern_file(const std::vector<RefinementResult>& results,
                                const Schema& schema, int n_sequences);

/// (events-per-sequence, sequence count) pairs, ascending by event count.
std::vector<std::pair<int, int>> events_histogram(const std::vector<Sequence>& db);

/// Refined patterns with at least one non-root slot.
int count_specialized(const std::vector<RefinementResult>& results);

/// Everything a mining run reports about itself.
struct RunReport {
  int sequences = 0;
  long long events = 0;
  std::vector<std::pair<int, int>> histogram;  // events-per-sequence counts

  std::string min_support_text;
  int theta = 0;
  int mg = kInf;
  int mpl = kInf;
  int max_pattern_events = 10;
  int occ_cap = 0;
  int threads = 1;
  bool ban_uniform_runs = false;
  bool relationship_only = false;

  double type_stage_seconds = 0.0;
  double refine_stage_seconds = 0.0;
  double total_seconds = 0.0;

  int type_patterns = 0;
  int refined_patterns = 0;
  int specialized_patterns = 0;
  bool complete = true;
};

/// Pretty-printed JSON document (trailing newline). Unlimited mg/mpl and an
/// unset occurrence cap serialize as null.
std::string to_json(const RunReport& report);

}  // namespace rasp
