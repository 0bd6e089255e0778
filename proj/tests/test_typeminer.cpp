#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "rasp/oracle.hpp"
#include "rasp/typeminer.hpp"
#include "support/instances.hpp"

using namespace rasp;

namespace {

Schema abc_schema() {
  return load_schema("eventtype a\neventtype b\neventtype c\n",
                     [](const std::string&) -> std::string { throw std::runtime_error("no tax"); });
}

// Builds a TypePattern from "a b ; c" style text against the given schema.
TypePattern mk(const Schema& schema, const std::string& text) {
  TypePattern tp;
  int txn = 0;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    if (tok == ";") {
      ++txn;
    } else {
      tp.types.push_back(schema.event_type_by_name(tok));
      tp.txn.push_back(txn);
    }
    tok.clear();
  };
  for (char ch : text) {
    if (ch == ' ')
      flush();
    else
      tok.push_back(ch);
  }
  flush();
  return tp;
}

std::set<std::string> texts(const Schema& schema, const std::vector<TypePattern>& pats) {
  std::set<std::string> out;
  for (const TypePattern& p : pats) out.insert(p.to_string(schema));
  return out;
}

const FrequentTypePattern* find_pattern(const TypeMineResult& r, const Schema& schema,
                                        const std::string& text) {
  for (const FrequentTypePattern& f : r.patterns)
    if (f.pattern.to_string(schema) == text) return &f;
  return nullptr;
}

std::vector<Sequence> parse_db(const std::string& text, const Schema& schema) {
  return load_database(text, schema);
}

}  // namespace

TEST_CASE("single event candidates enumerate the schema types") {
  Schema schema = abc_schema();
  auto c1 = level1_candidates(schema);
  CHECK(texts(schema, c1) == std::set<std::string>{"a", "b", "c"});
  for (const TypePattern& p : c1) {
    CHECK(p.n_events() == 1);
    CHECK(p.txn == std::vector<int>{0});
  }
}

TEST_CASE("deleting an event rebuilds the transaction structure") {
  Schema schema = abc_schema();
  TypePattern pat = mk(schema, "a b ; c ; a");
  CHECK(delete_event(pat, 0).to_string(schema) == "b ; c ; a");
  CHECK(delete_event(pat, 1).to_string(schema) == "a ; c ; a");
  CHECK(delete_event(pat, 2).to_string(schema) == "a b ; a");  // lone txn collapses
  CHECK(delete_event(pat, 3).to_string(schema) == "a b ; c");
  CHECK(head_pattern(pat).to_string(schema) == "a b ; c");
  CHECK(tail_pattern(pat).to_string(schema) == "b ; c ; a");

  TypePattern run = mk(schema, "a ; b ; c");
  CHECK(delete_event(run, 1).to_string(schema) == "a ; c");
  CHECK(delete_event(mk(schema, "a b c"), 1).to_string(schema) == "a c");
  CHECK_THROWS_AS(delete_event(run, 3), std::invalid_argument);
  CHECK_THROWS_AS(delete_event(run, -1), std::invalid_argument);
}

TEST_CASE("pairwise join builds every canonical two event candidate") {
  Schema schema = abc_schema();
  std::vector<TypePattern> f1 = {mk(schema, "a"), mk(schema, "b")};
  auto c2 = join_candidates(schema, f1);
  CHECK(texts(schema, c2) ==
        std::set<std::string>{"a a", "a b", "b b", "a ; a", "a ; b", "b ; a", "b ; b"});
  CHECK(c2.size() == 7);  // "b a" is non-canonical and must not appear
}

TEST_CASE("longer joins append the tail event in its transaction relation") {
  Schema schema = abc_schema();
  auto join2 = [&](const std::string& a, const std::string& b) {
    return texts(schema, join_candidates(schema, {mk(schema, a), mk(schema, b)}));
  };
  CHECK(join2("a ; b", "b ; c") == std::set<std::string>{"a ; b ; c"});
  CHECK(join2("a b", "b c") == std::set<std::string>{"a b c"});
  CHECK(join2("a b", "b ; c") == std::set<std::string>{"a b ; c"});
  CHECK(join2("a ; b", "b c") == std::set<std::string>{"a ; b c"});
  CHECK(join2("a ; b", "a ; c").empty());
  CHECK(texts(schema, join_candidates(schema, {mk(schema, "a ; a")})) ==
        std::set<std::string>{"a ; a ; a"});
}

TEST_CASE("apriori pruning is full with unlimited gap and endpoint-only otherwise") {
  Schema schema = abc_schema();
  std::vector<TypePattern> f2 = {mk(schema, "a b"), mk(schema, "b c")};
  std::vector<TypePattern> cands = join_candidates(schema, f2);
  CHECK(texts(schema, cands) == std::set<std::string>{"a b c"});

  MinerConfig no_gap;
  CHECK(prune_candidates(cands, f2, no_gap).empty());  // middle deletion "a c" infrequent

  MinerConfig gapped;
  gapped.mg = 2;
  auto kept = prune_candidates(cands, f2, gapped);
  CHECK(texts(schema, kept) == std::set<std::string>{"a b c"});

  SUBCASE("uniform run ban drops single-type candidates of three or more events") {
    std::vector<TypePattern> f2r = {mk(schema, "a ; a")};
    auto c3 = join_candidates(schema, f2r);
    CHECK(texts(schema, c3) == std::set<std::string>{"a ; a ; a"});
    MinerConfig banned;
    banned.ban_uniform_runs = true;
    CHECK(prune_candidates(c3, f2r, banned).empty());
    CHECK(prune_candidates(c3, f2r, no_gap).size() == 1);
  }
}

TEST_CASE("mining a small database finds the expected frequent set") {
  Schema schema = abc_schema();
  auto db = parse_db(
      "seq s1\ne a\ne b\nend\n"
      "seq s2\ne a\ne b\nend\n"
      "seq s3\ne b\nend\n",
      schema);

  MinerConfig cfg;
  cfg.theta = 2;
  TypeMineResult r = mine_type_patterns(db, schema, cfg);
  REQUIRE(r.patterns.size() == 3);
  CHECK(r.complete);
  CHECK(r.patterns[0].pattern.to_string(schema) == "a");
  CHECK(r.patterns[0].support == 2);
  CHECK(r.patterns[1].pattern.to_string(schema) == "b");
  CHECK(r.patterns[1].support == 3);
  CHECK(r.patterns[2].pattern.to_string(schema) == "a b");
  CHECK(r.patterns[2].support == 2);
  CHECK(r.patterns[2].supporting_seqs == std::vector<int>{0, 1});
  REQUIRE(r.patterns[2].occurrences.size() == 2);
  CHECK(r.patterns[2].occurrences[0].seq == 0);
  CHECK(r.patterns[2].occurrences[0].lambda == std::vector<int>{1, 2});
  CHECK(r.patterns[2].occurrences[1].seq == 1);

  cfg.theta = 4;
  CHECK(mine_type_patterns(db, schema, cfg).patterns.empty());
  cfg.theta = 0;
  CHECK_THROWS_AS(mine_type_patterns(db, schema, cfg), std::invalid_argument);
}

TEST_CASE("repeated type runs count occurrences combinatorially") {
  Schema schema = abc_schema();
  auto db = parse_db("seq s1\ne a\nts\ne a\nts\ne a\nts\ne a\nend\n", schema);

  MinerConfig cfg;
  cfg.max_pattern_events = 4;
  TypeMineResult r = mine_type_patterns(db, schema, cfg);
  REQUIRE(r.patterns.size() == 4);
  const std::vector<std::pair<std::string, size_t>> expected = {
      {"a", 4}, {"a ; a", 6}, {"a ; a ; a", 4}, {"a ; a ; a ; a", 1}};
  for (const auto& [text, n_occ] : expected) {
    const FrequentTypePattern* f = find_pattern(r, schema, text);
    REQUIRE_MESSAGE(f != nullptr, text);
    CHECK(f->support == 1);
    CHECK(f->occurrences.size() == n_occ);
  }

  SUBCASE("ban flag removes the longer uniform runs") {
    cfg.ban_uniform_runs = true;
    TypeMineResult banned = mine_type_patterns(db, schema, cfg);
    CHECK(texts(schema, [&] {
            std::vector<TypePattern> ps;
            for (const auto& f : banned.patterns) ps.push_back(f.pattern);
            return ps;
          }()) == std::set<std::string>{"a", "a ; a"});
  }

  SUBCASE("per sequence occurrence cap keeps the smallest lambdas") {
    cfg.occ_cap = 2;
    TypeMineResult capped = mine_type_patterns(db, schema, cfg);
    CHECK_FALSE(capped.complete);
    const FrequentTypePattern* f = find_pattern(capped, schema, "a ; a");
    REQUIRE(f != nullptr);
    CHECK(f->truncated);
    CHECK(f->support == 1);
    REQUIRE(f->occurrences.size() == 2);
    CHECK(f->occurrences[0].lambda == std::vector<int>{1, 2});
    CHECK(f->occurrences[1].lambda == std::vector<int>{1, 3});
    // mining still proceeds to longer patterns after a cap
    CHECK(find_pattern(capped, schema, "a ; a ; a") != nullptr);
  }
}

TEST_CASE("gap and span constraints flow through mining") {
  Schema schema = abc_schema();
  auto db = parse_db("seq s1\ne a\nts\ne b\nts\ne a\nend\n", schema);

  MinerConfig cfg;
  cfg.mg = 1;
  TypeMineResult tight = mine_type_patterns(db, schema, cfg);
  CHECK(find_pattern(tight, schema, "a ; a") == nullptr);  // gap is 2
  CHECK(find_pattern(tight, schema, "a ; b ; a") != nullptr);

  cfg.mg = 2;
  TypeMineResult loose = mine_type_patterns(db, schema, cfg);
  const FrequentTypePattern* aa = find_pattern(loose, schema, "a ; a");
  REQUIRE(aa != nullptr);
  REQUIRE(aa->occurrences.size() == 1);
  CHECK(aa->occurrences[0].lambda == std::vector<int>{1, 3});

  cfg.mg = kInf;
  cfg.mpl = 1;
  TypeMineResult short_span = mine_type_patterns(db, schema, cfg);
  CHECK(find_pattern(short_span, schema, "a ; a") == nullptr);  // spans 2 ordinals
  CHECK(find_pattern(short_span, schema, "a ; b") != nullptr);
}

TEST_CASE("mining matches exhaustive candidate checking on random instances") {
  for (unsigned seed = 1; seed <= 25; ++seed) {
    testsupport::Instance inst = testsupport::random_instance(seed, 5, 8);
    const Schema& schema = inst.schema;

    MinerConfig cfg;
    cfg.theta = 1 + static_cast<int>(seed % 3);
    cfg.max_pattern_events = 3;
    if (seed % 4 == 0) cfg.mg = 1 + static_cast<int>(seed % 2);
    if (seed % 5 == 0) cfg.mpl = 4;
    cfg.threads = (seed % 2) ? 1 : 3;
    TypeMineResult r = mine_type_patterns(inst.db, schema, cfg);
    CHECK(r.complete);

    // every canonical pattern of up to 3 events, checked the slow way
    std::vector<TypePattern> universe;
    int t = schema.n_event_types();
    for (int p = 1; p <= 3; ++p) {
      std::vector<int> types(p);
      auto rec = [&](auto&& self, int pos) -> void {
        if (pos == p) {
          for (int mask = 0; mask < (1 << (p - 1)); ++mask) {
            TypePattern tp;
            tp.types = types;
            tp.txn.push_back(0);
            bool canon = true;
            for (int e = 1; e < p; ++e) {
              bool sep = mask & (1 << (e - 1));
              tp.txn.push_back(tp.txn.back() + (sep ? 1 : 0));
              if (!sep && schema.name_rank(types[e - 1]) > schema.name_rank(types[e]))
                canon = false;
            }
            if (canon) universe.push_back(std::move(tp));
          }
          return;
        }
        for (types[pos] = 0; types[pos] < t; ++types[pos]) self(self, pos + 1);
      };
      rec(rec, 0);
    }

    std::set<std::string> expected;
    for (const TypePattern& tp : universe) {
      int support = 0;
      for (const Sequence& s : inst.db)
        if (!find_all_occurrences(tp, s, cfg.mg, cfg.mpl).empty()) ++support;
      if (support >= cfg.theta) expected.insert(tp.to_string(schema));
    }

    std::set<std::string> mined;
    for (const FrequentTypePattern& f : r.patterns) {
      mined.insert(f.pattern.to_string(schema));
      // occurrences must equal the per-sequence brute force, in order
      std::vector<Occurrence> expect_occ;
      for (int si = 0; si < static_cast<int>(inst.db.size()); ++si)
        for (auto& lam : oracle::naive_all_occurrences(f.pattern, inst.db[si], cfg.mg, cfg.mpl))
          expect_occ.push_back({si, std::move(lam)});
      CHECK(f.occurrences == expect_occ);
      CHECK(f.support == static_cast<int>(f.supporting_seqs.size()));
    }
    CHECK_MESSAGE(mined == expected, "seed ", seed);

    // head and tail of every reported pattern are themselves reported
    std::set<std::string> keys;
    for (const FrequentTypePattern& f : r.patterns) keys.insert(f.pattern.key());
    for (const FrequentTypePattern& f : r.patterns)
      if (f.pattern.n_events() >= 2) {
        CHECK(keys.count(head_pattern(f.pattern).key()) == 1);
        CHECK(keys.count(tail_pattern(f.pattern).key()) == 1);
      }
  }
}

TEST_CASE("database order does not change the mined pattern set") {
  testsupport::Instance inst = testsupport::random_instance(77, 6, 7);
  MinerConfig cfg;
  cfg.theta = 2;
  cfg.max_pattern_events = 3;
  TypeMineResult forward = mine_type_patterns(inst.db, inst.schema, cfg);

  std::vector<Sequence> reversed(inst.db.rbegin(), inst.db.rend());
  TypeMineResult backward = mine_type_patterns(reversed, inst.schema, cfg);

  REQUIRE(forward.patterns.size() == backward.patterns.size());
  for (size_t i = 0; i < forward.patterns.size(); ++i) {
    CHECK(forward.patterns[i].pattern.key() == backward.patterns[i].pattern.key());
    CHECK(forward.patterns[i].support == backward.patterns[i].support);
    CHECK(forward.patterns[i].occurrences.size() == backward.patterns[i].occurrences.size());
  }
}
