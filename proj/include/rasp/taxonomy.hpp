#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rasp {

/// Thrown by the file-format parsers. Carries a 1-based line number when the
/// source is line oriented (0 when it is not).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + std::move(message)
                                    : std::move(message)),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A rooted is-a tree of named concepts. Concepts are dense integer ids
/// assigned in pre-order, so id order doubles as the canonical traversal
/// rank. Immutable after construction; safe for concurrent reads.
class Taxonomy {
 public:
  static constexpr int kNoParent = -1;

  Taxonomy() = default;

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(labels_.size()); }
  int root() const { return 0; }

  const std::string& label(int concept_id) const { return labels_.at(concept_id); }
  int parent(int concept_id) const { return parents_.at(concept_id); }
  const std::vector<int>& children(int concept_id) const { return children_.at(concept_id); }
  bool is_leaf(int concept_id) const { return children_.at(concept_id).empty(); }

  /// Id of the concept with the given label; throws std::out_of_range if absent.
  int concept_by_label(std::string_view label) const;
  std::optional<int> try_concept(std::string_view label) const;

  /// Position of the concept in a pre-order depth-first traversal (children in
  /// file order). Ranks are a bijection onto 0..size()-1.
  int traversal_rank(int concept_id) const {
    (void)labels_.at(concept_id);
    return concept_id;
  }

  /// True iff a == b or a is a proper ancestor of b.
  bool subsumes(int a, int b) const {
    check_id(a);
    check_id(b);
    return a <= b && b < a + subtree_size_[a];
  }

  /// c plus all proper ancestors of c, root excluded, ordered from c upward.
  /// Empty when c is the root.
  std::vector<int> ancestors_excluding_root(int concept_id) const;

  /// Leaf ids in pre-order; used by the synthetic data generator.
  std::vector<int> leaves() const;

  int depth(int concept_id) const;

  /// Prefix-tree expression that parse_taxonomy() accepts, e.g. "(Any(Yes,No))".
  std::string serialize() const;

  friend Taxonomy parse_taxonomy(std::string name, std::string_view text);

 private:
  void check_id(int concept_id) const { (void)labels_.at(concept_id); }

  std::string name_;
  std::vector<std::string> labels_;        // indexed by concept id (pre-order)
  std::vector<int> parents_;               // kNoParent for the root
  std::vector<std::vector<int>> children_; // in file order
  std::vector<int> subtree_size_;          // nodes in the subtree rooted at id
  std::vector<std::pair<std::string, int>> by_label_; // sorted for lookup
};

/// Parses a parenthesized prefix-tree expression such as
/// "(Any(Tested(Sensitive,Resistant,Intermediate),Not-tested))".
/// `#` starts a comment to end of line; whitespace between tokens is ignored.
/// Labels may not contain '(', ')', ',', '#', or whitespace.
Taxonomy parse_taxonomy(std::string name, std::string_view text);

/// Element-wise subsumption over aligned concept arrays. The k-th entries of
/// both arrays must belong to taxonomies[k].
bool subsumes_array(std::span<const Taxonomy* const> taxonomies, std::span<const int> a,
                    std::span<const int> b);

}  // namespace rasp
