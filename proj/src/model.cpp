#include "rasp/model.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace rasp {
namespace {

// Splits text into (1-based line number, whitespace tokens), dropping `#`
// comments and blank lines.
std::vector<std::pair<int, std::vector<std::string>>> tokenize_lines(std::string_view text) {
  std::vector<std::pair<int, std::vector<std::string>>> out;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string> toks;
    std::istringstream iss{std::string(line)};
    for (std::string t; iss >> t;) toks.push_back(std::move(t));
    if (!toks.empty()) out.emplace_back(line_no, std::move(toks));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string> split_commas(const std::string& tok) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t c = tok.find(',', pos);
    out.push_back(tok.substr(pos, c == std::string::npos ? c : c - pos));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

int parse_int(const std::string& tok, int line) {
  try {
    size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + tok + "'", line);
  }
}

const std::vector<int> kEmptySchema{};

}  // namespace

std::optional<int> Schema::try_taxonomy(std::string_view name) const {
  for (int i = 0; i < n_taxonomies(); ++i)
    if (taxonomies_[i].name() == name) return i;
  return std::nullopt;
}

std::optional<int> Schema::try_event_type(std::string_view name) const {
  for (int i = 0; i < n_event_types(); ++i)
    if (types_[i].name == name) return i;
  return std::nullopt;
}

int Schema::event_type_by_name(std::string_view name) const {
  auto opt = try_event_type(name);
  if (!opt) throw std::out_of_range("unknown event type '" + std::string(name) + "'");
  return *opt;
}

const std::vector<int>& Schema::rel_schema(int type_a, int type_b) const {
  std::pair<int, int> key{std::min(type_a, type_b), std::max(type_a, type_b)};
  auto it = std::lower_bound(rels_.begin(), rels_.end(), key,
                             [](const auto& entry, const auto& k) { return entry.first < k; });
  if (it == rels_.end() || it->first != key) return kEmptySchema;
  return it->second;
}

Schema load_schema(std::string_view text,
                   const std::function<std::string(const std::string&)>& read_file) {
  Schema s;
  auto resolve_tax_list = [&](const std::string& tok, int line) {
    std::vector<int> ids;
    for (const std::string& name : split_commas(tok)) {
      auto id = s.try_taxonomy(name);
      if (!id) throw ParseError("unknown taxonomy '" + name + "'", line);
      ids.push_back(*id);
    }
    return ids;
  };

  std::map<std::pair<int, int>, std::vector<int>> rels;
  for (const auto& [line, toks] : tokenize_lines(text)) {
    const std::string& kw = toks[0];
    if (kw == "taxonomy") {
      if (toks.size() != 3) throw ParseError("taxonomy needs: taxonomy <name> <path>", line);
      if (s.try_taxonomy(toks[1]))
        throw ParseError("duplicate taxonomy '" + toks[1] + "'", line);
      std::string content;
      try {
        content = read_file(toks[2]);
      } catch (const std::exception& e) {
        throw ParseError("cannot read taxonomy file '" + toks[2] + "': " + e.what(), line);
      }
      try {
        s.taxonomies_.push_back(parse_taxonomy(toks[1], content));
      } catch (const ParseError& e) {
        throw ParseError("in taxonomy file '" + toks[2] + "': " + e.what(), line);
      }
    } else if (kw == "eventtype") {
      if (toks.size() < 2 || toks.size() > 3)
        throw ParseError("eventtype needs: eventtype <type> [<taxonomies>]", line);
      if (s.try_event_type(toks[1]))
        throw ParseError("duplicate event type '" + toks[1] + "'", line);
      Schema::EventType et{toks[1], {}};
      if (toks.size() == 3) et.tax_ids = resolve_tax_list(toks[2], line);
      s.types_.push_back(std::move(et));
    } else if (kw == "reltype") {
      if (toks.size() < 3 || toks.size() > 4)
        throw ParseError("reltype needs: reltype <typeA> <typeB> [<taxonomies>]", line);
      auto a = s.try_event_type(toks[1]);
      auto b = s.try_event_type(toks[2]);
      if (!a) throw ParseError("unknown event type '" + toks[1] + "'", line);
      if (!b) throw ParseError("unknown event type '" + toks[2] + "'", line);
      std::pair<int, int> key{std::min(*a, *b), std::max(*a, *b)};
      if (rels.count(key))
        throw ParseError("duplicate reltype for pair " + toks[1] + " " + toks[2], line);
      std::vector<int> tax_ids;
      if (toks.size() == 4) tax_ids = resolve_tax_list(toks[3], line);
      rels.emplace(key, std::move(tax_ids));
    } else {
      throw ParseError("unknown schema directive '" + kw + "'", line);
    }
  }
  s.rels_.assign(rels.begin(), rels.end());

  s.name_rank_.resize(s.types_.size());
  std::vector<int> order(s.types_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return s.types_[a].name < s.types_[b].name; });
  for (size_t r = 0; r < order.size(); ++r) s.name_rank_[order[r]] = static_cast<int>(r);
  return s;
}

std::string TypePattern::key() const {
  std::string k;
  k.reserve(types.size() * 2);
  for (int i = 0; i < n_events(); ++i) {
    if (i > 0) k += sep_after(i - 1) ? ';' : ',';
    k += std::to_string(types[i]);
  }
  return k;
}

std::string TypePattern::to_string(const Schema& schema) const {
  std::string out;
  for (int i = 0; i < n_events(); ++i) {
    if (i > 0) out += sep_after(i - 1) ? " ; " : " ";
    out += schema.event_type(types[i]).name;
  }
  return out;
}

SlotLayout slot_layout(const Schema& schema, const TypePattern& pat) {
  SlotLayout layout;
  for (int m = 0; m < pat.n_events(); ++m) {
    const auto& taxes = schema.event_type(pat.types[m]).tax_ids;
    for (int pos = 0; pos < static_cast<int>(taxes.size()); ++pos)
      layout.slots.push_back({false, m, -1, taxes[pos], pos});
    for (int k = 0; k < m; ++k) {
      const auto& rtaxes = schema.rel_schema(pat.types[m], pat.types[k]);
      for (int pos = 0; pos < static_cast<int>(rtaxes.size()); ++pos)
        layout.slots.push_back({true, m, k, rtaxes[pos], pos});
    }
  }
  return layout;
}

RefinedPattern all_root_refinement(const Schema& schema, const TypePattern& pat) {
  return {pat, std::vector<int>(slot_layout(schema, pat).slots.size(), 0)};
}

std::string to_string(const Schema& schema, const RefinedPattern& rp) {
  SlotLayout layout = slot_layout(schema, rp.base);
  if (rp.slots.size() != layout.slots.size())
    throw std::invalid_argument("refined pattern slot count does not match its layout");
  std::string out;
  int si = 0;  // slots are laid out in the same order we print events
  std::string rel_clauses;
  for (int m = 0; m < rp.base.n_events(); ++m) {
    if (m > 0) out += rp.base.sep_after(m - 1) ? " ; " : " ";
    out += schema.event_type(rp.base.types[m]).name;
    out += '(';
    const auto& taxes = schema.event_type(rp.base.types[m]).tax_ids;
    for (size_t pos = 0; pos < taxes.size(); ++pos) {
      if (pos) out += ',';
      out += schema.taxonomy(taxes[pos]).label(rp.slots[si]);
      ++si;
    }
    out += ')';
    for (int k = 0; k < m; ++k) {
      const auto& rtaxes = schema.rel_schema(rp.base.types[m], rp.base.types[k]);
      bool all_root = true;
      for (size_t pos = 0; pos < rtaxes.size(); ++pos)
        if (rp.slots[si + pos] != 0) all_root = false;
      if (!rtaxes.empty() && !all_root) {
        rel_clauses += " | r(" + std::to_string(m + 1) + "," + std::to_string(k + 1) + ")=[";
        for (size_t pos = 0; pos < rtaxes.size(); ++pos) {
          if (pos) rel_clauses += ',';
          rel_clauses += schema.taxonomy(rtaxes[pos]).label(rp.slots[si + pos]);
        }
        rel_clauses += ']';
      }
      si += static_cast<int>(rtaxes.size());
    }
  }
  return out + rel_clauses;
}

namespace {

// Shared by parse and canonicalize: orders events of one transaction by
// (type name rank, concept arrays element-wise).
bool event_less(const Schema& schema, const Event& a, const Event& b) {
  if (a.type != b.type) return schema.name_rank(a.type) < schema.name_rank(b.type);
  return a.concepts < b.concepts;  // concept ids are pre-order traversal ranks
}

}  // namespace

Sequence canonicalize(const Schema& schema, Sequence seq) {
  int n = seq.n_events();
  std::vector<int> perm(n);  // perm[new] = old
  std::iota(perm.begin(), perm.end(), 0);
  for (int begin = 0; begin < n;) {
    int end = begin + 1;
    while (end < n && seq.txn[end] == seq.txn[begin]) ++end;
    std::stable_sort(perm.begin() + begin, perm.begin() + end, [&](int a, int b) {
      return event_less(schema, seq.events[a], seq.events[b]);
    });
    begin = end;
  }
  Sequence out;
  out.id = std::move(seq.id);
  out.txn = seq.txn;
  out.events.reserve(n);
  for (int i = 0; i < n; ++i) out.events.push_back(std::move(seq.events[perm[i]]));
  out.rels.resize(static_cast<size_t>(n) * (n - 1) / 2);
  for (int a = 1; a < n; ++a)
    for (int b = 0; b < a; ++b) {
      int oa = perm[a], ob = perm[b];
      if (oa < ob) std::swap(oa, ob);
      out.rels[static_cast<size_t>(a) * (a - 1) / 2 + b] =
          seq.rels[static_cast<size_t>(oa) * (oa - 1) / 2 + ob];
    }
  return out;
}

std::vector<Sequence> parse_sequence_db(std::string_view text, const Schema& schema) {
  std::vector<Sequence> db;
  bool in_seq = false;
  Sequence cur;
  std::vector<int> event_lines;
  struct RawRel {
    int k, l, line;
    std::vector<std::string> labels;
  };
  std::vector<RawRel> raw_rels;
  int cur_txn = 0;
  bool txn_open = false;  // current transaction has at least one event

  auto finish_sequence = [&](int end_line) {
    int n = cur.n_events();
    // pairwise-distinct events per transaction
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n && cur.txn[j] == cur.txn[i]; ++j)
        if (cur.events[i] == cur.events[j])
          throw ParseError("duplicate event within a transaction (events " + std::to_string(i + 1) +
                               " and " + std::to_string(j + 1) + ") in sequence '" + cur.id + "'",
                           event_lines[j]);
    // default all relationship arrays, then overlay explicit ones
    cur.rels.assign(static_cast<size_t>(n) * (n - 1) / 2, {});
    for (int a = 1; a < n; ++a)
      for (int b = 0; b < a; ++b) {
        const auto& rs = schema.rel_schema(cur.events[a].type, cur.events[b].type);
        cur.rels[static_cast<size_t>(a) * (a - 1) / 2 + b].assign(rs.size(), 0);
      }
    std::vector<bool> seen(cur.rels.size(), false);
    for (const RawRel& rr : raw_rels) {
      if (rr.l < 1 || rr.k > n)
        throw ParseError("relationship indices " + std::to_string(rr.k) + " " +
                             std::to_string(rr.l) + " out of range (sequence has " +
                             std::to_string(n) + " events)",
                         rr.line);
      size_t idx = static_cast<size_t>(rr.k - 1) * (rr.k - 2) / 2 + (rr.l - 1);
      if (seen[idx])
        throw ParseError("duplicate relationship line for pair " + std::to_string(rr.k) + " " +
                             std::to_string(rr.l),
                         rr.line);
      seen[idx] = true;
      const auto& rs = schema.rel_schema(cur.events[rr.k - 1].type, cur.events[rr.l - 1].type);
      if (rr.labels.size() != rs.size())
        throw ParseError("relationship concept count " + std::to_string(rr.labels.size()) +
                             " does not match schema length " + std::to_string(rs.size()),
                         rr.line);
      std::vector<int> concepts;
      for (size_t p = 0; p < rs.size(); ++p) {
        auto c = schema.taxonomy(rs[p]).try_concept(rr.labels[p]);
        if (!c)
          throw ParseError("unknown concept '" + rr.labels[p] + "' in taxonomy '" +
                               schema.taxonomy(rs[p]).name() + "'",
                           rr.line);
        concepts.push_back(*c);
      }
      cur.rels[idx] = std::move(concepts);
    }
    (void)end_line;
    db.push_back(canonicalize(schema, std::move(cur)));
  };

  for (const auto& [line, toks] : tokenize_lines(text)) {
    const std::string& kw = toks[0];
    if (!in_seq) {
      if (kw != "seq") throw ParseError("expected 'seq <id>', got '" + kw + "'", line);
      if (toks.size() != 2) throw ParseError("seq needs exactly one id token", line);
      cur = Sequence{};
      cur.id = toks[1];
      event_lines.clear();
      raw_rels.clear();
      cur_txn = 0;
      txn_open = false;
      in_seq = true;
    } else if (kw == "e") {
      if (toks.size() < 2 || toks.size() > 3)
        throw ParseError("event needs: e <type> [<concepts>]", line);
      auto t = schema.try_event_type(toks[1]);
      if (!t) throw ParseError("unknown event type '" + toks[1] + "'", line);
      const auto& taxes = schema.event_type(*t).tax_ids;
      std::vector<std::string> labels;
      if (toks.size() == 3) labels = split_commas(toks[2]);
      if (labels.size() != taxes.size())
        throw ParseError("event concept count " + std::to_string(labels.size()) +
                             " does not match schema length " + std::to_string(taxes.size()) +
                             " for type '" + toks[1] + "'",
                         line);
      Event ev{*t, {}};
      for (size_t p = 0; p < taxes.size(); ++p) {
        auto c = schema.taxonomy(taxes[p]).try_concept(labels[p]);
        if (!c)
          throw ParseError("unknown concept '" + labels[p] + "' in taxonomy '" +
                               schema.taxonomy(taxes[p]).name() + "'",
                           line);
        ev.concepts.push_back(*c);
      }
      cur.events.push_back(std::move(ev));
      cur.txn.push_back(cur_txn);
      event_lines.push_back(line);
      txn_open = true;
    } else if (kw == "ts") {
      if (!txn_open) throw ParseError("empty transaction before 'ts'", line);
      ++cur_txn;
      txn_open = false;
    } else if (kw == "r") {
      if (toks.size() != 4) throw ParseError("relationship needs: r <k> <l> <concepts>", line);
      int k = parse_int(toks[1], line);
      int l = parse_int(toks[2], line);
      if (k <= l)
        throw ParseError("relationship indices must satisfy k > l, got " + toks[1] + " " + toks[2],
                         line);
      raw_rels.push_back({k, l, line, split_commas(toks[3])});
    } else if (kw == "end") {
      if (!txn_open && !cur.events.empty())
        throw ParseError("empty transaction before 'end'", line);
      finish_sequence(line);
      in_seq = false;
    } else {
      throw ParseError("unknown directive '" + kw + "' inside sequence block", line);
    }
  }
  if (in_seq) throw ParseError("unterminated sequence block (missing 'end')");
  return db;
}

std::vector<Sequence> load_database(std::string_view text, const Schema& schema) {
  std::vector<Sequence> db = parse_sequence_db(text, schema);
  std::sort(db.begin(), db.end(), [](const Sequence& a, const Sequence& b) { return a.id < b.id; });
  for (size_t i = 1; i < db.size(); ++i)
    if (db[i - 1].id == db[i].id)
      throw ParseError("duplicate sequence id '" + db[i].id + "'");
  return db;
}

std::string serialize_sequence_db(const std::vector<Sequence>& db, const Schema& schema) {
  std::string out;
  for (const Sequence& seq : db) {
    out += "seq " + seq.id + "\n";
    for (int i = 0; i < seq.n_events(); ++i) {
      if (i > 0 && seq.sep_after(i - 1)) out += "ts\n";
      const Event& ev = seq.events[i];
      out += "e " + schema.event_type(ev.type).name;
      const auto& taxes = schema.event_type(ev.type).tax_ids;
      for (size_t p = 0; p < ev.concepts.size(); ++p) {
        out += p == 0 ? " " : ",";
        out += schema.taxonomy(taxes[p]).label(ev.concepts[p]);
      }
      out += "\n";
    }
    for (int a = 1; a < seq.n_events(); ++a)
      for (int b = 0; b < a; ++b) {
        const std::vector<int>& r = seq.rel(a, b);
        bool all_root = std::all_of(r.begin(), r.end(), [](int c) { return c == 0; });
        if (r.empty() || all_root) continue;
        const auto& rtaxes = schema.rel_schema(seq.events[a].type, seq.events[b].type);
        out += "r " + std::to_string(a + 1) + " " + std::to_string(b + 1);
        for (size_t p = 0; p < r.size(); ++p) {
          out += p == 0 ? " " : ",";
          out += schema.taxonomy(rtaxes[p]).label(r[p]);
        }
        out += "\n";
      }
    out += "end\n";
  }
  return out;
}

int event_index(const Sequence& seq, int i) {
  if (i < 1 || i > seq.n_events())
    throw std::out_of_range("event ordinal " + std::to_string(i) + " out of range");
  return i + seq.txn[i - 1];
}

std::vector<Event> project(const Sequence& seq, const std::vector<int>& lambda) {
  std::vector<Event> out;
  out.reserve(lambda.size());
  int prev = 0;
  for (int pos : lambda) {
    if (pos <= prev || pos > seq.n_events())
      throw std::invalid_argument("projection indices must be strictly increasing and in range");
    out.push_back(seq.events[pos - 1]);
    prev = pos;
  }
  return out;
}

TypePattern type_aware(const Sequence& seq) {
  TypePattern tp;
  tp.types.reserve(seq.n_events());
  for (const Event& ev : seq.events) tp.types.push_back(ev.type);
  tp.txn = seq.txn;
  return tp;
}

std::vector<int> flatten_occurrence(const Schema& schema, const Sequence& seq,
                                    const std::vector<int>& lambda, const SlotLayout& layout) {
  std::vector<int> out;
  out.reserve(layout.slots.size());
  for (const Slot& slot : layout.slots) {
    int pos_m = lambda.at(slot.event) - 1;
    if (slot.is_rel) {
      int pos_k = lambda.at(slot.partner) - 1;
      const std::vector<int>& r = seq.rel(pos_m, pos_k);
      if (slot.pos >= static_cast<int>(r.size()))
        throw std::invalid_argument("missing relationship entry for projected pair");
      out.push_back(r[slot.pos]);
    } else {
      out.push_back(seq.events.at(pos_m).concepts.at(slot.pos));
    }
  }
  return out;
}

namespace {

// Per-event and per-pair concept views of a refined pattern, unpacked from the
// flat slot array for direct use in matching.
struct UnpackedRefinement {
  std::vector<std::vector<int>> event_concepts;            // [m] -> concepts
  std::vector<std::vector<std::vector<int>>> pair_concepts;  // [m][k<m] -> concepts
};

UnpackedRefinement unpack(const Schema& schema, const RefinedPattern& rp) {
  SlotLayout layout = slot_layout(schema, rp.base);
  if (rp.slots.size() != layout.slots.size())
    throw std::invalid_argument("refined pattern slot count does not match its layout");
  int p = rp.base.n_events();
  UnpackedRefinement u;
  u.event_concepts.resize(p);
  u.pair_concepts.resize(p);
  for (int m = 0; m < p; ++m) u.pair_concepts[m].resize(m);
  for (int si = 0; si < layout.q(); ++si) {
    const Slot& slot = layout.slots[si];
    if (slot.is_rel)
      u.pair_concepts[slot.event][slot.partner].push_back(rp.slots[si]);
    else
      u.event_concepts[slot.event].push_back(rp.slots[si]);
  }
  return u;
}

}  // namespace

bool pattern_matches(const Schema& schema, const RefinedPattern& rp, const Sequence& seq, int mg,
                     int mpl) {
  const TypePattern& pat = rp.base;
  int p = pat.n_events();
  int n = seq.n_events();
  if (p == 0) throw std::invalid_argument("empty pattern");
  UnpackedRefinement u = unpack(schema, rp);

  std::vector<int> lambda(p, 0);  // 1-based positions
  // Depth-first over all strictly increasing lambda; first full match wins.
  auto extend = [&](auto&& self, int m) -> bool {
    for (int j = (m == 0 ? 1 : lambda[m - 1] + 1); j <= n; ++j) {
      if (m > 0 && mg != kInf && j - lambda[m - 1] > mg) break;
      if (m > 0 && mpl != kInf && j - lambda[0] > mpl) break;
      const Event& ev = seq.events[j - 1];
      if (ev.type != pat.types[m]) continue;
      const auto& taxes = schema.event_type(pat.types[m]).tax_ids;
      bool ok = true;
      for (size_t q = 0; ok && q < taxes.size(); ++q)
        if (!schema.taxonomy(taxes[q]).subsumes(u.event_concepts[m][q], ev.concepts[q])) ok = false;
      for (int k = 0; ok && k < m; ++k) {
        if (pat.separated(k, m) != seq.separated(lambda[k] - 1, j - 1)) ok = false;
        if (!ok) break;
        const auto& rtaxes = schema.rel_schema(pat.types[m], pat.types[k]);
        const std::vector<int>& r = seq.rel(j - 1, lambda[k] - 1);
        for (size_t q = 0; ok && q < rtaxes.size(); ++q)
          if (!schema.taxonomy(rtaxes[q]).subsumes(u.pair_concepts[m][k][q], r[q])) ok = false;
      }
      if (!ok) continue;
      lambda[m] = j;
      if (m + 1 == p || self(self, m + 1)) return true;
    }
    return false;
  };
  return extend(extend, 0);
}

}  // namespace rasp
