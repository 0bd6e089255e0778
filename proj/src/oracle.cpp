#include "rasp/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace rasp::oracle {
namespace {

// Does lambda embed pat in seq? Type equality, separation agreement on every
// pair, gap and span limits. Spelled out directly from the definitions.
bool embeds(const TypePattern& pat, const Sequence& seq, const std::vector<int>& lambda, int mg,
            int mpl) {
  int p = pat.n_events();
  for (int i = 0; i < p; ++i)
    if (seq.events[lambda[i] - 1].type != pat.types[i]) return false;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (pat.separated(i, j) != seq.separated(lambda[i] - 1, lambda[j] - 1)) return false;
  if (mg != kInf)
    for (int i = 0; i + 1 < p; ++i)
      if (lambda[i + 1] - lambda[i] > mg) return false;
  if (mpl != kInf && p > 0 && lambda[p - 1] - lambda[0] > mpl) return false;
  return true;
}

void combinations(int n, int k, std::vector<int>& cur, int next,
                  const std::function<void(const std::vector<int>&)>& visit) {
  if (static_cast<int>(cur.size()) == k) {
    visit(cur);
    return;
  }
  for (int j = next; j <= n; ++j) {
    cur.push_back(j);
    combinations(n, k, cur, j + 1, visit);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> naive_all_occurrences(const TypePattern& pat, const Sequence& seq,
                                                    int mg, int mpl) {
  if (pat.n_events() == 0) throw std::invalid_argument("empty pattern");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  combinations(seq.n_events(), pat.n_events(), cur, 1, [&](const std::vector<int>& lambda) {
    if (embeds(pat, seq, lambda, mg, mpl)) out.push_back(lambda);
  });
  return out;
}

namespace {

// All canonical type-patterns with exactly p events over the schema's types:
// every type choice crossed with every separator layout, keeping those whose
// transactions are in name order.
void enumerate_type_patterns(const Schema& schema, int p, std::vector<TypePattern>& out) {
  int nt = schema.n_event_types();
  std::vector<int> types(p);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == p) {
      for (unsigned mask = 0; mask < (1u << (p - 1)); ++mask) {
        TypePattern tp;
        tp.types = types;
        tp.txn.assign(p, 0);
        for (int e = 1; e < p; ++e) tp.txn[e] = tp.txn[e - 1] + ((mask >> (e - 1)) & 1);
        bool canonical = true;
        for (int e = 1; e < p; ++e)
          if (tp.txn[e] == tp.txn[e - 1] &&
              schema.name_rank(tp.types[e - 1]) > schema.name_rank(tp.types[e]))
            canonical = false;
        if (canonical) out.push_back(std::move(tp));
      }
      return;
    }
    for (int t = 0; t < nt; ++t) {
      types[i] = t;
      self(self, i + 1);
    }
  };
  if (p >= 1 && nt > 0) rec(rec, 0);
}

// One occurrence of the current type-pattern, reduced to the concepts it
// realizes in each slot.
struct ValueRow {
  int seq;
  std::vector<int> vals;
  bool operator==(const ValueRow&) const = default;
};

int lowest_common_ancestor(const Taxonomy& tax, int a, int b) {
  while (!tax.subsumes(a, b)) a = tax.parent(a);
  return a;
}

// Rows arrive sorted by sequence, so one pass counts distinct sequences.
int distinct_seqs(const std::vector<ValueRow>& rows, const std::vector<int>& idx) {
  int count = 0, last = -1;
  for (int r : idx)
    if (rows[r].seq != last) {
      ++count;
      last = rows[r].seq;
    }
  return count;
}

}  // namespace

std::vector<std::pair<RefinedPattern, int>> brute_force_mine(const std::vector<Sequence>& db,
                                                             const Schema& schema,
                                                             const OracleConfig& cfg) {
  if (cfg.theta < 1) throw std::invalid_argument("theta must be >= 1");
  if (cfg.max_pattern_events < 1 || cfg.max_pattern_events > 4)
    throw std::invalid_argument("oracle handles at most 4 events per pattern");
  if (db.size() > 60) throw std::invalid_argument("oracle input too large (sequences)");
  for (const Sequence& s : db)
    if (s.n_events() > 12) throw std::invalid_argument("oracle input too large (events)");
  for (int x = 0; x < schema.n_taxonomies(); ++x)
    if (schema.taxonomy(x).size() > 16) throw std::invalid_argument("oracle taxonomy too large");

  std::vector<std::pair<RefinedPattern, int>> result;
  for (int p = 1; p <= cfg.max_pattern_events; ++p) {
    std::vector<TypePattern> tps;
    enumerate_type_patterns(schema, p, tps);
    std::sort(tps.begin(), tps.end(), [&](const TypePattern& a, const TypePattern& b) {
      return a.to_string(schema) < b.to_string(schema);
    });
    for (const TypePattern& tp : tps) {
      SlotLayout layout = slot_layout(schema, tp);
      int q = layout.q();

      // Every occurrence of tp, as the concept it realizes in each slot.
      std::vector<ValueRow> rows;
      for (int si = 0; si < static_cast<int>(db.size()); ++si)
        for (const auto& lambda : naive_all_occurrences(tp, db[si], cfg.mg, cfg.mpl))
          rows.push_back({si, flatten_occurrence(schema, db[si], lambda, layout)});
      std::sort(rows.begin(), rows.end(), [](const ValueRow& a, const ValueRow& b) {
        return std::tie(a.seq, a.vals) < std::tie(b.seq, b.vals);
      });
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      std::vector<int> all_rows(rows.size());
      std::iota(all_rows.begin(), all_rows.end(), 0);
      if (distinct_seqs(rows, all_rows) < cfg.theta) continue;

      // A maximal assignment takes, in each slot, the deepest common ancestor
      // of the occurrence values it covers. So per slot only the realized
      // values, their pairwise common ancestors, and the root can appear.
      std::vector<std::vector<int>> cands(q);
      for (int j = 0; j < q; ++j) {
        if (cfg.relationship_only && !layout.slots[j].is_rel) {
          cands[j] = {0};  // event slots stay at the root
          continue;
        }
        const Taxonomy& tax = schema.taxonomy(layout.slots[j].taxonomy);
        std::set<int> cs;
        for (const ValueRow& r : rows) cs.insert(r.vals[j]);
        for (bool grew = true; grew;) {
          grew = false;
          std::vector<int> cur(cs.begin(), cs.end());
          for (size_t x = 0; x < cur.size(); ++x)
            for (size_t y = x + 1; y < cur.size(); ++y)
              if (cs.insert(lowest_common_ancestor(tax, cur[x], cur[y])).second) grew = true;
        }
        cs.insert(0);
        cands[j].assign(cs.begin(), cs.end());
      }

      // frequent concept assignments that can still be maximal
      std::vector<std::pair<std::vector<int>, int>> frequent;
      std::vector<int> slots(q, 0);
      long long budget = 4'000'000;
      auto assign = [&](auto&& self, int j, const std::vector<int>& covered) -> void {
        if (--budget < 0)
          throw std::logic_error("oracle refinement search exceeded its node budget");
        if (j == q) {
          frequent.emplace_back(slots, distinct_seqs(rows, covered));
          return;
        }
        const Taxonomy& tax = schema.taxonomy(layout.slots[j].taxonomy);
        std::vector<std::pair<int, std::vector<int>>> viable;
        for (int c : cands[j]) {
          std::vector<int> kept;
          for (int r : covered)
            if (tax.subsumes(c, rows[r].vals[j])) kept.push_back(r);
          if (distinct_seqs(rows, kept) >= cfg.theta) viable.emplace_back(c, std::move(kept));
        }
        for (size_t x = 0; x < viable.size(); ++x) {
          // drop a choice whose coverage a strictly deeper choice matches:
          // any completion of it could be deepened, so none is maximal
          bool dominated = false;
          for (size_t y = 0; y < viable.size() && !dominated; ++y)
            if (x != y && tax.subsumes(viable[x].first, viable[y].first) &&
                viable[x].first != viable[y].first && viable[x].second == viable[y].second)
              dominated = true;
          if (dominated) continue;
          slots[j] = viable[x].first;
          self(self, j + 1, viable[x].second);
        }
        slots[j] = 0;
      };
      assign(assign, 0, all_rows);

      // keep assignments with no strictly-more-specific frequent assignment
      for (size_t a = 0; a < frequent.size(); ++a) {
        bool maximal = true;
        for (size_t b = 0; maximal && b < frequent.size(); ++b) {
          if (a == b || frequent[a].first == frequent[b].first) continue;
          bool a_subsumes_b = true;
          for (int j = 0; a_subsumes_b && j < q; ++j)
            if (!schema.taxonomy(layout.slots[j].taxonomy)
                     .subsumes(frequent[a].first[j], frequent[b].first[j]))
              a_subsumes_b = false;
          if (a_subsumes_b) maximal = false;
        }
        if (maximal) result.emplace_back(RefinedPattern{tp, frequent[a].first}, frequent[a].second);
      }
    }
  }
  return result;
}

}  // namespace rasp::oracle
