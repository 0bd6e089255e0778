#pragma once

#include <cstdint>

#include "rasp/model.hpp"

namespace rasp {

/// Small self-contained PRNG (the splitmix64 mixer: golden-ratio increment
/// 0x9E3779B97F4A7C15, finalizer multiplies 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB). Chosen over std::mt19937 so the byte-identical-output
/// guarantee does not depend on library-specific distribution internals.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform draw from [0, n); n >= 1.
  int below(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
  }

  /// Uniform draw from [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }
};

/// Shape of a generated full b-ary taxonomy: `branching` children per
/// internal node, `depth` levels below the root (depth 0 = root only).
struct TaxShape {
  int branching = 2;
  int depth = 2;
};

/// Declares a relationship between one unordered type pair (a <= b allowed to
/// be equal for self-relationships) with a single concept slot of the given
/// taxonomy shape.
struct RelShape {
  int type_a = 0;
  int type_b = 0;
  TaxShape shape{};
};

/// A pattern to inject plus the fraction of sequences that receive it.
struct Plant {
  RefinedPattern pattern;
  double prob = 0.0;
};

struct GenSpec {
  uint64_t seed = 1;
  int n_sequences = 0;

  // events per sequence: fixed count, or a geometric draw with the given
  // mean (clamped to [1, 6 * mean])
  bool geometric_lengths = false;
  int events_fixed = 8;
  double events_mean = 8.0;

  // schema shape: one concept slot per event type, each with its own taxonomy
  int n_event_types = 3;
  TaxShape event_shape{};
  std::vector<RelShape> rels;

  double txn_break_prob = 0.4;  // chance of a transaction boundary per event
  double rel_noise_prob = 0.0;  // chance a declared pair gets random leaf concepts

  std::vector<Plant> planted;
};

/// Everything generate_db emits, as in-memory files.
struct GeneratedData {
  std::vector<std::pair<std::string, std::string>> taxonomy_files;  // (path, content)
  std::string schema_text;
  std::string db_text;
};

/// The schema generate_db(spec) will use, so planted patterns can be phrased
/// against it before generation.
Schema build_gen_schema(const GenSpec& spec);

/// Deterministic synthetic database. Planted patterns are injected into
/// floor(prob * n) sequences each (chosen by seeded shuffle) as consecutive
/// whole transactions, so every injected sequence matches the pattern under
/// unlimited gap/span. Background events draw uniform leaf concepts. Distinct
/// events per transaction are enforced by resampling.
/// Throws std::invalid_argument for out-of-range parameters or when a planted
/// pattern has more events than the per-sequence maximum.
GeneratedData generate_db(const GenSpec& spec);

}  // namespace rasp
