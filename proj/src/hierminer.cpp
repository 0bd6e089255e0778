#include "rasp/hierminer.hpp"

#include <algorithm>
#include <stdexcept>

#include "rasp/parallel.hpp"

namespace rasp {

int Vocabulary::ordinal_of(int concept_id, int slot) const {
  VocabItem probe{concept_id, slot};
  auto less = [](const VocabItem& a, const VocabItem& b) {
    return std::pair(a.slot, a.concept_id) < std::pair(b.slot, b.concept_id);
  };
  auto it = std::lower_bound(items.begin(), items.end(), probe, less);
  if (it == items.end() || it->concept_id != concept_id || it->slot != slot) return -1;
  return static_cast<int>(it - items.begin());
}

Vocabulary build_vocabulary(const Schema& schema, const std::vector<Sequence>& db,
                            const FrequentTypePattern& ftp, bool relationship_only) {
  Vocabulary vocab;
  vocab.layout = slot_layout(schema, ftp.pattern);
  std::vector<std::vector<char>> seen(vocab.layout.q());
  for (int j = 0; j < vocab.layout.q(); ++j)
    seen[j].assign(schema.taxonomy(vocab.layout.slots[j].taxonomy).size(), 0);

  for (const Occurrence& occ : ftp.occurrences) {
    std::vector<int> flat = flatten_occurrence(schema, db[occ.seq], occ.lambda, vocab.layout);
    for (int j = 0; j < vocab.layout.q(); ++j) {
      if (relationship_only && !vocab.layout.slots[j].is_rel) continue;
      const Taxonomy& tax = schema.taxonomy(vocab.layout.slots[j].taxonomy);
      for (int c : tax.ancestors_excluding_root(flat[j])) seen[j][c] = 1;
    }
  }
  for (int j = 0; j < vocab.layout.q(); ++j)
    for (int c = 0; c < static_cast<int>(seen[j].size()); ++c)
      if (seen[j][c]) vocab.items.push_back(VocabItem{c, j});
  // concept ids are preorder ranks, so this pass already leaves items sorted
  // by (slot, concept id)
  return vocab;
}

OccurrenceMatrix build_occurrence_matrix(const Schema& schema, const std::vector<Sequence>& db,
                                         const FrequentTypePattern& ftp, const Vocabulary& vocab) {
  OccurrenceMatrix m;
  m.n_rows = static_cast<int>(ftp.occurrences.size());
  m.item_rows.resize(vocab.n_items());
  m.seq_of_row.reserve(ftp.occurrences.size());
  for (int r = 0; r < m.n_rows; ++r) {
    const Occurrence& occ = ftp.occurrences[r];
    m.seq_of_row.push_back(occ.seq);
    std::vector<int> flat = flatten_occurrence(schema, db[occ.seq], occ.lambda, vocab.layout);
    for (int j = 0; j < vocab.layout.q(); ++j) {
      const Taxonomy& tax = schema.taxonomy(vocab.layout.slots[j].taxonomy);
      for (int c : tax.ancestors_excluding_root(flat[j])) {
        int ord = vocab.ordinal_of(c, j);
        if (ord >= 0) m.item_rows[ord].push_back(r);
      }
    }
  }
  return m;
}

int sequence_support(const std::vector<int>& rows, const std::vector<int>& seq_of_row) {
  int count = 0;
  int prev = -1;
  for (int r : rows) {
    if (count == 0 || seq_of_row[r] != prev) ++count;
    prev = seq_of_row[r];
  }
  return count;
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct MaxiMiner {
  const OccurrenceMatrix& matrix;
  int theta;
  std::vector<std::vector<int>> found;

  bool covered(const std::vector<int>& set) const {
    for (const auto& f : found)
      if (is_subset(set, f)) return true;
    return false;
  }

  // itemset: current set; rows: its intersected row set; cand: frequent
  // one-item extensions, ascending, each already checked against itemset.
  void search(std::vector<int>& itemset, const std::vector<int>& rows,
              const std::vector<int>& cand) {
    if (cand.empty()) {
      if (!itemset.empty() && !covered(itemset)) found.push_back(itemset);
      return;
    }
    // if even taking every remaining candidate cannot escape an already-found
    // maximal set, nothing new can come from this subtree
    std::vector<int> ceiling = itemset;
    ceiling.insert(ceiling.end(), cand.begin(), cand.end());
    if (covered(ceiling)) return;

    for (size_t i = 0; i < cand.size(); ++i) {
      int a = cand[i];
      std::vector<int> rows_a = intersect(rows, matrix.item_rows[a]);
      std::vector<int> next_cand;
      for (size_t k = i + 1; k < cand.size(); ++k) {
        int b = cand[k];
        if (sequence_support(intersect(rows_a, matrix.item_rows[b]), matrix.seq_of_row) >= theta)
          next_cand.push_back(b);
      }
      itemset.push_back(a);
      search(itemset, rows_a, next_cand);
      itemset.pop_back();
    }
  }
};

}  // namespace

std::vector<std::vector<int>> mine_maximal_refinements(const OccurrenceMatrix& matrix,
                                                       const Vocabulary& vocab, int theta) {
  if (theta < 1) throw std::invalid_argument("minimum support must be >= 1");
  MaxiMiner miner{matrix, theta, {}};
  std::vector<int> cand0;
  for (int i = 0; i < vocab.n_items(); ++i)
    if (sequence_support(matrix.item_rows[i], matrix.seq_of_row) >= theta) cand0.push_back(i);
  if (!cand0.empty()) {
    std::vector<int> all_rows(matrix.n_rows);
    for (int r = 0; r < matrix.n_rows; ++r) all_rows[r] = r;
    std::vector<int> itemset;
    miner.search(itemset, all_rows, cand0);
  }
  std::sort(miner.found.begin(), miner.found.end());
  return miner.found;
}

RefinedPattern itemset_to_pattern(const std::vector<int>& itemset, const FrequentTypePattern& ftp,
                                  const Vocabulary& vocab, const Schema& schema) {
  RefinedPattern rp = all_root_refinement(schema, ftp.pattern);
  std::vector<int> deepest(vocab.layout.q(), -1);
  for (int ord : itemset) {
    const VocabItem& item = vocab.items.at(ord);
    int& d = deepest[item.slot];
    if (d == -1) {
      d = item.concept_id;
      continue;
    }
    const Taxonomy& tax = schema.taxonomy(vocab.layout.slots[item.slot].taxonomy);
    if (tax.subsumes(d, item.concept_id))
      d = item.concept_id;
    else if (!tax.subsumes(item.concept_id, d))
      throw std::domain_error("incomparable concepts assigned to one slot");
  }
  for (int j = 0; j < vocab.layout.q(); ++j)
    if (deepest[j] != -1) rp.slots[j] = deepest[j];
  return rp;
}

std::vector<RefinementResult> refine_all(const std::vector<FrequentTypePattern>& ftps,
                                         const std::vector<Sequence>& db, const Schema& schema,
                                         int theta, bool relationship_only, int threads) {
  std::vector<RefinementResult> out(ftps.size());
  parallel_for(static_cast<int>(ftps.size()), threads, [&](int i) {
    const FrequentTypePattern& ftp = ftps[i];
    RefinementResult& res = out[i];
    res.base = ftp.pattern;
    Vocabulary vocab = build_vocabulary(schema, db, ftp, relationship_only);
    OccurrenceMatrix matrix = build_occurrence_matrix(schema, db, ftp, vocab);
    auto maximal = mine_maximal_refinements(matrix, vocab, theta);
    if (maximal.empty()) {
      res.refinements.emplace_back(all_root_refinement(schema, ftp.pattern), ftp.support);
      return;
    }
    for (const auto& itemset : maximal) {
      std::vector<int> rows;
      bool first = true;
      for (int ord : itemset) {
        rows = first ? matrix.item_rows[ord] : intersect(rows, matrix.item_rows[ord]);
        first = false;
      }
      int support = sequence_support(rows, matrix.seq_of_row);
      res.refinements.emplace_back(itemset_to_pattern(itemset, ftp, vocab, schema), support);
    }
  });
  return out;
}

}  // namespace rasp
