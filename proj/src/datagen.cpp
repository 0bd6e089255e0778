#include "rasp/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>

namespace rasp {

namespace {

std::string type_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "t%02d", i);
  return buf;
}

// Full b-ary prefix-tree expression of the given depth; labels carry the
// taxonomy-local prefix plus the pre-order index.
std::string tax_expr(const std::string& prefix, const TaxShape& shape) {
  int counter = 0;
  auto rec = [&](auto&& self, int depth) -> std::string {
    std::string label = prefix + "n" + std::to_string(counter++);
    if (depth == shape.depth) return label;
    std::string out = label + "(";
    for (int c = 0; c < shape.branching; ++c) {
      if (c) out += ",";
      out += self(self, depth + 1);
    }
    return out + ")";
  };
  return "(" + rec(rec, 0) + ")";
}

void validate(const GenSpec& spec) {
  if (spec.n_sequences < 0) throw std::invalid_argument("sequence count must be >= 0");
  if (spec.n_event_types < 1) throw std::invalid_argument("need at least one event type");
  if (spec.event_shape.branching < 1 || spec.event_shape.depth < 0)
    throw std::invalid_argument("bad event taxonomy shape");
  if (spec.geometric_lengths ? spec.events_mean < 1.0 : spec.events_fixed < 1)
    throw std::invalid_argument("events per sequence must be >= 1");
  for (const RelShape& r : spec.rels) {
    if (r.type_a < 0 || r.type_a >= spec.n_event_types || r.type_b < 0 ||
        r.type_b >= spec.n_event_types)
      throw std::invalid_argument("relationship declares an unknown event type");
    if (r.shape.branching < 1 || r.shape.depth < 0)
      throw std::invalid_argument("bad relationship taxonomy shape");
  }
  for (const Plant& p : spec.planted)
    if (p.prob < 0.0 || p.prob > 1.0)
      throw std::invalid_argument("plant probability must be in [0,1]");
  if (spec.txn_break_prob < 0.0 || spec.txn_break_prob > 1.0 || spec.rel_noise_prob < 0.0 ||
      spec.rel_noise_prob > 1.0)
    throw std::invalid_argument("probability must be in [0,1]");
}

int max_events_per_seq(const GenSpec& spec) {
  if (!spec.geometric_lengths) return spec.events_fixed;
  return std::max(1, static_cast<int>(std::llround(spec.events_mean * 6)));
}

GeneratedData make_schema_files(const GenSpec& spec) {
  GeneratedData out;
  std::string schema;
  for (int i = 0; i < spec.n_event_types; ++i) {
    std::string tax = "Tax" + std::to_string(i);
    std::string path = "tax" + std::to_string(i) + ".tax";
    out.taxonomy_files.emplace_back(path, tax_expr(type_name(i), spec.event_shape) + "\n");
    schema += "taxonomy " + tax + " " + path + "\n";
  }
  for (size_t j = 0; j < spec.rels.size(); ++j) {
    std::string tax = "Rel" + std::to_string(j);
    std::string path = "rel" + std::to_string(j) + ".tax";
    out.taxonomy_files.emplace_back(path, tax_expr("r" + std::to_string(j), spec.rels[j].shape) +
                                              "\n");
    schema += "taxonomy " + tax + " " + path + "\n";
  }
  for (int i = 0; i < spec.n_event_types; ++i)
    schema += "eventtype " + type_name(i) + " Tax" + std::to_string(i) + "\n";
  for (size_t j = 0; j < spec.rels.size(); ++j)
    schema += "reltype " + type_name(spec.rels[j].type_a) + " " + type_name(spec.rels[j].type_b) +
              " Rel" + std::to_string(j) + "\n";
  out.schema_text = schema;
  return out;
}

Schema load_gen_schema(const GeneratedData& files) {
  return load_schema(files.schema_text, [&](const std::string& path) -> std::string {
    for (const auto& [p, content] : files.taxonomy_files)
      if (p == path) return content;
    throw std::runtime_error("unknown taxonomy path " + path);
  });
}

int sample_length(const GenSpec& spec, SplitMix64& rng, int cap) {
  if (!spec.geometric_lengths) return spec.events_fixed;
  double p = 1.0 / spec.events_mean;
  if (p >= 1.0) return 1;
  double u = rng.unit();
  int k = 1 + static_cast<int>(std::floor(std::log1p(-u) / std::log1p(-p)));
  return std::clamp(k, 1, cap);
}

int uniform_leaf(const Taxonomy& tax, int under, SplitMix64& rng) {
  std::vector<int> pool;
  for (int leaf : tax.leaves())
    if (tax.subsumes(under, leaf)) pool.push_back(leaf);
  return pool[rng.below(static_cast<int>(pool.size()))];
}

// An event tagged with the plant (if any) that produced it.
struct TaggedEvent {
  Event ev;
  int plant = -1;
  int plant_event = -1;
};

}  // namespace

Schema build_gen_schema(const GenSpec& spec) {
  validate(spec);
  return load_gen_schema(make_schema_files(spec));
}

GeneratedData generate_db(const GenSpec& spec) {
  validate(spec);
  GeneratedData files = make_schema_files(spec);
  Schema schema = load_gen_schema(files);

  int cap = max_events_per_seq(spec);
  std::vector<SlotLayout> plant_layouts;
  for (const Plant& p : spec.planted) {
    SlotLayout layout = slot_layout(schema, p.pattern.base);
    if (p.pattern.base.n_events() > cap)
      throw std::invalid_argument("planted pattern has more events than a sequence can hold");
    if (static_cast<int>(p.pattern.slots.size()) != layout.q())
      throw std::invalid_argument("planted pattern slot count does not fit its base");
    for (int j = 0; j < layout.q(); ++j) {
      const Taxonomy& tax = schema.taxonomy(layout.slots[j].taxonomy);
      if (p.pattern.slots[j] < 0 || p.pattern.slots[j] >= tax.size())
        throw std::invalid_argument("planted pattern names an unknown concept");
    }
    plant_layouts.push_back(std::move(layout));
  }

  SplitMix64 rng(spec.seed);

  // which sequences receive which plants (seeded shuffle per plant)
  std::vector<std::vector<int>> plants_of_seq(spec.n_sequences);
  for (size_t pi = 0; pi < spec.planted.size(); ++pi) {
    int m = static_cast<int>(std::floor(spec.planted[pi].prob * spec.n_sequences));
    std::vector<int> order(spec.n_sequences);
    for (int i = 0; i < spec.n_sequences; ++i) order[i] = i;
    for (int i = spec.n_sequences - 1; i > 0; --i)
      std::swap(order[i], order[rng.below(i + 1)]);
    for (int i = 0; i < m; ++i) plants_of_seq[order[i]].push_back(static_cast<int>(pi));
  }

  std::vector<Sequence> db;
  db.reserve(spec.n_sequences);
  for (int si = 0; si < spec.n_sequences; ++si) {
    int length = sample_length(spec, rng, cap);
    int plant_events = 0;
    for (int pi : plants_of_seq[si]) plant_events += spec.planted[pi].pattern.base.n_events();
    int background = std::max(0, length - plant_events);

    // background transactions of distinct (type, concept) events
    std::vector<std::vector<TaggedEvent>> txns;
    for (int e = 0; e < background; ++e) {
      bool fresh = txns.empty() || (e > 0 && rng.chance(spec.txn_break_prob));
      if (fresh) txns.emplace_back();
      Event ev;
      bool placed = false;
      for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
        ev.type = rng.below(spec.n_event_types);
        ev.concepts.assign(1, uniform_leaf(schema.taxonomy(ev.type), 0, rng));
        placed = std::none_of(txns.back().begin(), txns.back().end(),
                              [&](const TaggedEvent& t) { return t.ev == ev; });
      }
      if (!placed) txns.emplace_back();  // crowded transaction: start a new one
      txns.back().push_back(TaggedEvent{ev, -1, -1});
    }

    // planted blocks: whole transactions spliced in at a random boundary
    std::vector<std::vector<int>> realized_concepts;  // slot concepts per plant, in order
    for (int pi : plants_of_seq[si]) {
      const Plant& plant = spec.planted[pi];
      const TypePattern& base = plant.pattern.base;
      const SlotLayout& layout = plant_layouts[pi];

      std::vector<std::vector<TaggedEvent>> block;
      std::vector<int> slot_concepts(layout.q());
      bool realized = false;
      for (int attempt = 0; attempt < 50 && !realized; ++attempt) {
        block.clear();
        Sequence probe;
        probe.id = "probe";
        for (int m = 0; m < base.n_events(); ++m) {
          if (m == 0 || base.sep_after(m - 1)) block.emplace_back();
          Event ev;
          ev.type = base.types[m];
          block.back().push_back(TaggedEvent{ev, pi, m});
          probe.txn.push_back(base.txn[m]);
        }
        // concepts per slot: a uniform leaf under the planted concept
        for (int j = 0; j < layout.q(); ++j)
          slot_concepts[j] =
              uniform_leaf(schema.taxonomy(layout.slots[j].taxonomy), plant.pattern.slots[j], rng);
        for (int j = 0; j < layout.q(); ++j)
          if (!layout.slots[j].is_rel)
            for (auto& txn : block)
              for (TaggedEvent& te : txn)
                if (te.plant_event == layout.slots[j].event)
                  te.ev.concepts.push_back(slot_concepts[j]);

        // distinct events per transaction, then an actual match check on a
        // standalone probe sequence carrying the block's rel arrays
        bool distinct = true;
        for (const auto& txn : block)
          for (size_t x = 0; x < txn.size() && distinct; ++x)
            for (size_t y = x + 1; y < txn.size() && distinct; ++y)
              if (txn[x].ev == txn[y].ev) distinct = false;
        if (!distinct) continue;

        for (auto& txn : block)
          for (TaggedEvent& te : txn) probe.events.push_back(te.ev);
        int n = probe.n_events();
        probe.rels.resize(static_cast<size_t>(n) * (n - 1) / 2);
        for (int a = 1; a < n; ++a)
          for (int b = 0; b < a; ++b)
            probe.rels[static_cast<size_t>(a) * (a - 1) / 2 + b].assign(
                schema.rel_schema(probe.events[a].type, probe.events[b].type).size(), 0);
        for (int j = 0; j < layout.q(); ++j)
          if (layout.slots[j].is_rel) {
            int a = layout.slots[j].event, b = layout.slots[j].partner;
            probe.rels[static_cast<size_t>(a) * (a - 1) / 2 + b][layout.slots[j].pos] =
                slot_concepts[j];
          }
        realized = pattern_matches(schema, plant.pattern, canonicalize(schema, probe), kInf, kInf);
      }
      if (!realized)
        throw std::invalid_argument("could not realize a planted pattern with distinct events");

      int boundary = rng.below(static_cast<int>(txns.size()) + 1);
      txns.insert(txns.begin() + boundary, block.begin(), block.end());
      realized_concepts.push_back(slot_concepts);
    }

    // assemble the final sequence
    Sequence seq;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "g%05d", si);
    seq.id = idbuf;
    std::vector<std::pair<int, int>> origin;  // (plant, plant_event) per event
    for (size_t t = 0; t < txns.size(); ++t)
      for (const TaggedEvent& te : txns[t]) {
        seq.events.push_back(te.ev);
        seq.txn.push_back(static_cast<int>(t));
        origin.emplace_back(te.plant, te.plant_event);
      }
    int n = seq.n_events();
    seq.rels.resize(static_cast<size_t>(n) * (n - 1) / 2);
    for (int a = 1; a < n; ++a)
      for (int b = 0; b < a; ++b)
        seq.rels[static_cast<size_t>(a) * (a - 1) / 2 + b].assign(
            schema.rel_schema(seq.events[a].type, seq.events[b].type).size(), 0);

    // planted relationship concepts
    std::set<std::pair<int, int>> planted_pairs;
    {
      size_t which = 0;
      for (int pi : plants_of_seq[si]) {
        const SlotLayout& layout = plant_layouts[pi];
        const std::vector<int>& concepts = realized_concepts[which++];
        std::vector<int> pos_of(spec.planted[pi].pattern.base.n_events(), -1);
        for (int idx = 0; idx < n; ++idx)
          if (origin[idx].first == pi) pos_of[origin[idx].second] = idx;
        for (int j = 0; j < layout.q(); ++j)
          if (layout.slots[j].is_rel) {
            int a = pos_of[layout.slots[j].event], b = pos_of[layout.slots[j].partner];
            if (a < b) std::swap(a, b);
            seq.rels[static_cast<size_t>(a) * (a - 1) / 2 + b][layout.slots[j].pos] = concepts[j];
            planted_pairs.insert({a, b});
          }
      }
    }

    // background relationship noise on untouched pairs
    for (int a = 1; a < n; ++a)
      for (int b = 0; b < a; ++b) {
        auto& arr = seq.rels[static_cast<size_t>(a) * (a - 1) / 2 + b];
        if (arr.empty() || planted_pairs.count({a, b})) continue;
        if (!rng.chance(spec.rel_noise_prob)) continue;
        const std::vector<int>& taxes = schema.rel_schema(seq.events[a].type, seq.events[b].type);
        for (size_t k = 0; k < arr.size(); ++k)
          arr[k] = uniform_leaf(schema.taxonomy(taxes[k]), 0, rng);
      }

    db.push_back(canonicalize(schema, std::move(seq)));
  }

  files.db_text = serialize_sequence_db(db, schema);
  return files;
}

}  // namespace rasp
