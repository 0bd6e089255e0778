#include "rasp/typeminer.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "rasp/parallel.hpp"

namespace rasp {

TypePattern delete_event(const TypePattern& pat, int i) {
  int p = pat.n_events();
  if (i < 0 || i >= p) throw std::invalid_argument("event index out of range");
  TypePattern out;
  int prev_orig = -1;
  for (int e = 0; e < p; ++e) {
    if (e == i) continue;
    out.types.push_back(pat.types[e]);
    if (prev_orig == -1)
      out.txn.push_back(0);
    else
      out.txn.push_back(out.txn.back() + (pat.txn[e] != pat.txn[prev_orig] ? 1 : 0));
    prev_orig = e;
  }
  return out;
}

TypePattern head_pattern(const TypePattern& pat) { return delete_event(pat, pat.n_events() - 1); }

TypePattern tail_pattern(const TypePattern& pat) { return delete_event(pat, 0); }

std::vector<TypePattern> level1_candidates(const Schema& schema) {
  std::vector<TypePattern> out;
  for (int t = 0; t < schema.n_event_types(); ++t) out.push_back(TypePattern{{t}, {0}});
  return out;
}

std::vector<TypePattern> join_candidates(const Schema& schema,
                                         const std::vector<TypePattern>& frequent_k_minus_1) {
  std::vector<TypePattern> out;
  std::unordered_set<std::string> seen;
  auto emit = [&](TypePattern tp) {
    if (seen.insert(tp.key()).second) out.push_back(std::move(tp));
  };
  if (frequent_k_minus_1.empty()) return out;

  if (frequent_k_minus_1[0].n_events() == 1) {
    for (const TypePattern& a : frequent_k_minus_1)
      for (const TypePattern& b : frequent_k_minus_1) {
        int x = a.types[0], y = b.types[0];
        emit(TypePattern{{x, y}, {0, 1}});
        if (schema.name_rank(x) <= schema.name_rank(y)) emit(TypePattern{{x, y}, {0, 0}});
      }
    return out;
  }

  // group patterns by head key so each A only meets compatible B's
  std::unordered_map<std::string, std::vector<int>> by_head;
  for (size_t i = 0; i < frequent_k_minus_1.size(); ++i)
    by_head[head_pattern(frequent_k_minus_1[i]).key()].push_back(static_cast<int>(i));
  for (const TypePattern& a : frequent_k_minus_1) {
    auto it = by_head.find(tail_pattern(a).key());
    if (it == by_head.end()) continue;
    for (int bi : it->second) {
      const TypePattern& b = frequent_k_minus_1[bi];
      TypePattern cand = a;
      cand.types.push_back(b.types.back());
      bool b_sep = b.n_events() >= 2 && b.sep_after(b.n_events() - 2);
      cand.txn.push_back(cand.txn.back() + (b_sep ? 1 : 0));
      // joining canonical patterns keeps transactions sorted; keep the guard
      // anyway so a malformed input cannot produce an unmatchable candidate
      if (!b_sep && schema.name_rank(cand.types[cand.n_events() - 2]) >
                        schema.name_rank(cand.types.back()))
        continue;
      emit(std::move(cand));
    }
  }
  return out;
}

std::vector<TypePattern> prune_candidates(std::vector<TypePattern> candidates,
                                          const std::vector<TypePattern>& frequent_k_minus_1,
                                          const MinerConfig& cfg) {
  std::unordered_set<std::string> frequent;
  for (const TypePattern& f : frequent_k_minus_1) frequent.insert(f.key());
  std::vector<TypePattern> out;
  for (TypePattern& cand : candidates) {
    int p = cand.n_events();
    if (cfg.ban_uniform_runs && p >= 3 &&
        std::all_of(cand.types.begin(), cand.types.end(),
                    [&](int t) { return t == cand.types[0]; }))
      continue;
    bool ok;
    if (cfg.mg == kInf) {
      ok = true;
      for (int i = 0; ok && i < p; ++i)
        if (!frequent.count(delete_event(cand, i).key())) ok = false;
    } else {
      ok = frequent.count(head_pattern(cand).key()) && frequent.count(tail_pattern(cand).key());
    }
    if (ok) out.push_back(std::move(cand));
  }
  return out;
}

namespace {

// Checks one candidate against the given sequences; fills occurrence and
// support data, applying the per-sequence cap when configured.
FrequentTypePattern check_candidate(const TypePattern& cand, const std::vector<Sequence>& db,
                                    const std::vector<int>& seqs_to_check,
                                    const MinerConfig& cfg) {
  FrequentTypePattern ftp;
  ftp.pattern = cand;
  for (int si : seqs_to_check) {
    auto occ = find_all_occurrences(cand, db[si], cfg.mg, cfg.mpl);
    if (occ.empty()) continue;
    if (cfg.occ_cap > 0 && static_cast<int>(occ.size()) > cfg.occ_cap) {
      occ.resize(cfg.occ_cap);  // keeps the lexicographically smallest lambdas
      ftp.truncated = true;
    }
    ftp.supporting_seqs.push_back(si);
    for (auto& lambda : occ) ftp.occurrences.push_back({si, std::move(lambda)});
  }
  ftp.support = static_cast<int>(ftp.supporting_seqs.size());
  return ftp;
}

}  // namespace

TypeMineResult mine_type_patterns(const std::vector<Sequence>& db, const Schema& schema,
                                  const MinerConfig& cfg) {
  if (cfg.theta < 1) throw std::invalid_argument("minimum support must be >= 1");
  if (cfg.max_pattern_events < 1) throw std::invalid_argument("pattern event cap must be >= 1");
  if (cfg.occ_cap < 0) throw std::invalid_argument("occurrence cap must be >= 1 when set");

  TypeMineResult result;
  std::vector<int> all_seqs(db.size());
  for (size_t i = 0; i < db.size(); ++i) all_seqs[i] = static_cast<int>(i);

  std::vector<int> level;  // indices into result.patterns for the current size
  for (int k = 1; k <= cfg.max_pattern_events; ++k) {
    std::vector<TypePattern> cands;
    if (k == 1) {
      cands = level1_candidates(schema);
    } else {
      std::vector<TypePattern> prev_patterns;
      prev_patterns.reserve(level.size());
      for (int li : level) prev_patterns.push_back(result.patterns[li].pattern);
      cands = prune_candidates(join_candidates(schema, prev_patterns), prev_patterns, cfg);
    }
    if (cands.empty()) break;

    std::unordered_map<std::string, int> prev_index;  // key -> result.patterns index
    for (int li : level) prev_index.emplace(result.patterns[li].pattern.key(), li);

    std::vector<FrequentTypePattern> checked(cands.size());
    parallel_for(static_cast<int>(cands.size()), cfg.threads, [&](int ci) {
      const TypePattern& cand = cands[ci];
      if (k == 1) {
        checked[ci] = check_candidate(cand, db, all_seqs, cfg);
        return;
      }
      // only sequences supporting both parents can support the candidate
      const auto& head_sup =
          result.patterns[prev_index.at(head_pattern(cand).key())].supporting_seqs;
      const auto& tail_sup =
          result.patterns[prev_index.at(tail_pattern(cand).key())].supporting_seqs;
      std::vector<int> seqs;
      std::set_intersection(head_sup.begin(), head_sup.end(), tail_sup.begin(), tail_sup.end(),
                            std::back_inserter(seqs));
      checked[ci] = check_candidate(cand, db, seqs, cfg);
    });

    level.clear();
    for (FrequentTypePattern& ftp : checked)
      if (ftp.support >= cfg.theta) {
        if (ftp.truncated) result.complete = false;
        level.push_back(static_cast<int>(result.patterns.size()));
        result.patterns.push_back(std::move(ftp));
      }
    if (level.empty()) break;
  }

  std::sort(result.patterns.begin(), result.patterns.end(),
            [&](const FrequentTypePattern& a, const FrequentTypePattern& b) {
              if (a.pattern.n_events() != b.pattern.n_events())
                return a.pattern.n_events() < b.pattern.n_events();
              return a.pattern.to_string(schema) < b.pattern.to_string(schema);
            });
  return result;
}

}  // namespace rasp
