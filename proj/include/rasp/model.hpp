#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "rasp/taxonomy.hpp"

namespace rasp {

/// Sentinel for "no bound" on the gap / projected-length constraints.
constexpr int kInf = std::numeric_limits<int>::max();

/// Event-type and relationship-type declarations plus the taxonomies they
/// reference. Immutable after load_schema.
class Schema {
 public:
  struct EventType {
    std::string name;
    std::vector<int> tax_ids;  // taxonomy per concept position; may be empty
  };

  int n_taxonomies() const { return static_cast<int>(taxonomies_.size()); }
  const Taxonomy& taxonomy(int tax_id) const { return taxonomies_.at(tax_id); }
  std::optional<int> try_taxonomy(std::string_view name) const;

  int n_event_types() const { return static_cast<int>(types_.size()); }
  const EventType& event_type(int type_id) const { return types_.at(type_id); }
  std::optional<int> try_event_type(std::string_view name) const;
  int event_type_by_name(std::string_view name) const;

  /// Rank of the type name in lexicographic (byte) order over all declared
  /// type names; the canonical within-transaction sort key.
  int name_rank(int type_id) const { return name_rank_.at(type_id); }

  /// Relationship schema for the unordered type pair; empty when undeclared.
  const std::vector<int>& rel_schema(int type_a, int type_b) const;

  friend Schema load_schema(std::string_view text,
                            const std::function<std::string(const std::string&)>& read_file);

 private:
  std::vector<Taxonomy> taxonomies_;
  std::vector<EventType> types_;
  std::vector<int> name_rank_;
  // keyed by (min type id, max type id)
  std::vector<std::pair<std::pair<int, int>, std::vector<int>>> rels_;  // sorted by key
};

/// Parses the line-based schema format:
///   taxonomy <name> <path>
///   eventtype <type> [<taxonomy>(,<taxonomy>)*]
///   reltype <typeA> <typeB> [<taxonomy>(,<taxonomy>)*]
/// `#` starts a comment. `read_file` resolves taxonomy paths to file contents.
Schema load_schema(std::string_view text,
                   const std::function<std::string(const std::string&)>& read_file);

struct Event {
  int type;
  std::vector<int> concepts;  // aligned with the type's taxonomy array
  bool operator==(const Event&) const = default;
};

/// A canonicalized sequence: events grouped into transactions, plus the
/// pairwise relationship arrays for every event pair whose type pair has a
/// non-empty relationship schema (all-root when the input omitted them).
struct Sequence {
  std::string id;
  std::vector<Event> events;
  std::vector<int> txn;  // 0-based transaction ordinal per event, non-decreasing
  // triangular: pair (a,b) with a>b (0-based event indices) at a*(a-1)/2+b;
  // empty vector when the pair's relationship schema is empty
  std::vector<std::vector<int>> rels;

  int n_events() const { return static_cast<int>(events.size()); }
  int n_transactions() const { return events.empty() ? 0 : txn.back() + 1; }
  const std::vector<int>& rel(int a, int b) const {
    if (a < b) std::swap(a, b);
    return rels.at(static_cast<size_t>(a) * (a - 1) / 2 + b);
  }
  /// Separator between consecutive events i and i+1 (0-based)?
  bool sep_after(int i) const { return txn.at(i) != txn.at(i + 1); }
  /// True when events a and b (0-based, any order) lie in different transactions.
  bool separated(int a, int b) const { return txn.at(a) != txn.at(b); }
};

/// Stage-1 pattern: event types with transaction structure, no concepts.
struct TypePattern {
  std::vector<int> types;  // event type ids
  std::vector<int> txn;    // as in Sequence

  int n_events() const { return static_cast<int>(types.size()); }
  bool sep_after(int i) const { return txn.at(i) != txn.at(i + 1); }
  bool separated(int a, int b) const { return txn.at(a) != txn.at(b); }
  bool operator==(const TypePattern&) const = default;

  /// Compact id-based key for hashing / dedup within one schema.
  std::string key() const;
  /// Human/display form, e.g. "a b ; c".
  std::string to_string(const Schema& schema) const;
};

/// One slot of the flattened concept-aware representation of a type-pattern.
struct Slot {
  bool is_rel;
  int event;     // 0-based pattern event index m
  int partner;   // 0-based partner index k < event for relationship slots, else -1
  int taxonomy;  // taxonomy id in the schema
  int pos;       // index within the (event or pair) taxonomy array
};

/// Slot order: for each event m, its event-concept slots, then its
/// relationship slots towards earlier events k = 0..m-1.
struct SlotLayout {
  std::vector<Slot> slots;
  int q() const { return static_cast<int>(slots.size()); }
};

SlotLayout slot_layout(const Schema& schema, const TypePattern& pat);

/// A type-pattern with one concept chosen per slot.
struct RefinedPattern {
  TypePattern base;
  std::vector<int> slots;  // concept ids, aligned with slot_layout(base)
  bool operator==(const RefinedPattern&) const = default;
};

/// All-root refinement of a type-pattern.
RefinedPattern all_root_refinement(const Schema& schema, const TypePattern& pat);

/// Display form, e.g. "B(Bacteria) T(J01) | r(2,1)=[Resistant]"; relationship
/// groups whose concepts are all roots are omitted; groups are listed by
/// (m,k), m ascending then k ascending, with 1-based event ordinals.
std::string to_string(const Schema& schema, const RefinedPattern& rp);

/// Parses `seq <id>` ... `end` blocks with `e <type>[ <c1>,<c2>,...]`, `ts`,
/// and `r <k> <l> <c1>,...` lines (k > l, 1-based file-order event ordinals).
/// Sequences come back canonicalized, in file order.
std::vector<Sequence> parse_sequence_db(std::string_view text, const Schema& schema);

/// parse_sequence_db + sort by id (byte order); duplicate ids are an error.
std::vector<Sequence> load_database(std::string_view text, const Schema& schema);

/// Canonical file form of a database (what datagen emits): events in canonical
/// order, only non-all-root relationship lines, stable line order.
std::string serialize_sequence_db(const std::vector<Sequence>& db, const Schema& schema);

/// Sorts each transaction by (type name, concept array) and re-indexes the
/// relationship arrays accordingly; idempotent.
Sequence canonicalize(const Schema& schema, Sequence seq);

/// Index of the i-th event (1-based) in the element list where transaction
/// separators count as elements; 1-based result.
int event_index(const Sequence& seq, int i);

/// Sub-list of events at 1-based positions lambda (strictly increasing).
std::vector<Event> project(const Sequence& seq, const std::vector<int>& lambda);

/// The sequence viewed as a type-pattern (types + separators).
TypePattern type_aware(const Sequence& seq);

/// Flattened concept array (length layout.q()) of the projection of `seq` at
/// `lambda` (1-based, strictly increasing): event-concept slots from the
/// projected events, relationship slots from the host sequence's arrays.
std::vector<int> flatten_occurrence(const Schema& schema, const Sequence& seq,
                                    const std::vector<int>& lambda, const SlotLayout& layout);

/// Straightforward matching predicate: is there a strictly increasing lambda
/// where types are equal, pattern concepts subsume sequence concepts per event
/// and per pair, every event pair agrees on transaction separation, and
/// consecutive gaps / total span respect mg / mpl (event ordinals)?
bool pattern_matches(const Schema& schema, const RefinedPattern& rp, const Sequence& seq, int mg,
                     int mpl);

}  // namespace rasp
