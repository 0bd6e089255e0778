#include "rasp/taxonomy.hpp"

#include <algorithm>
#include <cctype>

namespace rasp {
namespace {

bool is_label_char(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ',' &&
         c != '#';
}

// Strips comments and whitespace, leaving the token stream of the expression.
// Tracks the line each token came from so errors can point at it.
struct Cursor {
  std::string_view text;
  size_t pos = 0;
  int line = 1;

  void skip_blanks() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (c == '\n') {
        ++line;
        ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_blanks();
    return pos == text.size();
  }

  char peek() {
    skip_blanks();
    return pos < text.size() ? text[pos] : '\0';
  }

  void expect(char c) {
    if (peek() != c)
      throw ParseError(std::string("expected '") + c + "' in taxonomy expression", line);
    ++pos;
  }

  std::string label() {
    skip_blanks();
    size_t start = pos;
    while (pos < text.size() && is_label_char(text[pos])) ++pos;
    if (pos == start) throw ParseError("expected concept label", line);
    return std::string(text.substr(start, pos - start));
  }
};

}  // namespace

Taxonomy parse_taxonomy(std::string name, std::string_view text) {
  Taxonomy tax;
  tax.name_ = std::move(name);

  Cursor cur{text};
  // Recursive-descent without recursion: a stack of concept ids whose child
  // lists are still open.
  std::vector<int> open;

  auto add_node = [&](std::string label, int parent) {
    int id = static_cast<int>(tax.labels_.size());
    tax.labels_.push_back(std::move(label));
    tax.parents_.push_back(parent);
    tax.children_.emplace_back();
    if (parent != Taxonomy::kNoParent) tax.children_[parent].push_back(id);
    return id;
  };

  cur.expect('(');
  open.push_back(add_node(cur.label(), Taxonomy::kNoParent));
  while (!open.empty()) {
    char c = cur.peek();
    if (c == '(') {
      ++cur.pos;
      open.push_back(add_node(cur.label(), open.back()));
    } else if (c == ',') {
      if (tax.parents_[open.back()] == Taxonomy::kNoParent)
        throw ParseError("taxonomy must have a single root", cur.line);
      ++cur.pos;
      open.back() = add_node(cur.label(), tax.parents_[open.back()]);
    } else if (c == ')') {
      ++cur.pos;
      open.pop_back();
    } else {
      throw ParseError("expected '(', ',' or ')' in taxonomy expression", cur.line);
    }
  }
  if (!cur.eof()) throw ParseError("trailing text after taxonomy expression", cur.line);

  int n = tax.size();
  tax.subtree_size_.assign(n, 1);
  for (int id = n - 1; id > 0; --id) tax.subtree_size_[tax.parents_[id]] += tax.subtree_size_[id];

  tax.by_label_.reserve(n);
  for (int id = 0; id < n; ++id) tax.by_label_.emplace_back(tax.labels_[id], id);
  std::sort(tax.by_label_.begin(), tax.by_label_.end());
  for (size_t i = 1; i < tax.by_label_.size(); ++i)
    if (tax.by_label_[i - 1].first == tax.by_label_[i].first)
      throw ParseError("duplicate concept label '" + tax.by_label_[i].first + "' in taxonomy '" +
                       tax.name_ + "'");
  return tax;
}

int Taxonomy::concept_by_label(std::string_view label) const {
  auto opt = try_concept(label);
  if (!opt)
    throw std::out_of_range("no concept '" + std::string(label) + "' in taxonomy '" + name_ + "'");
  return *opt;
}

std::optional<int> Taxonomy::try_concept(std::string_view label) const {
  auto it = std::lower_bound(by_label_.begin(), by_label_.end(), label,
                             [](const auto& entry, std::string_view l) { return entry.first < l; });
  if (it == by_label_.end() || it->first != label) return std::nullopt;
  return it->second;
}

std::vector<int> Taxonomy::ancestors_excluding_root(int concept_id) const {
  check_id(concept_id);
  std::vector<int> out;
  for (int c = concept_id; c != root(); c = parents_[c]) out.push_back(c);
  return out;
}

std::vector<int> Taxonomy::leaves() const {
  std::vector<int> out;
  for (int id = 0; id < size(); ++id)
    if (children_[id].empty()) out.push_back(id);
  return out;
}

int Taxonomy::depth(int concept_id) const {
  check_id(concept_id);
  int d = 0;
  for (int c = concept_id; c != root(); c = parents_[c]) ++d;
  return d;
}

std::string Taxonomy::serialize() const {
  std::string out;
  // Emit pre-order; a node opens "(label" when it has children, otherwise just
  // its label, with separators reconstructed from tree shape.
  struct Frame {
    int id;
    size_t next_child;
  };
  std::vector<Frame> stack;
  out += '(';
  out += labels_[0];
  stack.push_back({0, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& kids = children_[f.id];
    if (f.next_child < kids.size()) {
      int kid = kids[f.next_child++];
      out += f.next_child == 1 ? '(' : ',';
      out += labels_[kid];
      stack.push_back({kid, 0});
    } else {
      if (!kids.empty()) out += ')';
      stack.pop_back();
    }
  }
  out += ')';
  return out;
}

bool subsumes_array(std::span<const Taxonomy* const> taxonomies, std::span<const int> a,
                    std::span<const int> b) {
  if (a.size() != taxonomies.size() || b.size() != taxonomies.size())
    throw std::invalid_argument("concept array length does not match taxonomy list");
  for (size_t k = 0; k < taxonomies.size(); ++k)
    if (!taxonomies[k]->subsumes(a[k], b[k])) return false;
  return true;
}

}  // namespace rasp
