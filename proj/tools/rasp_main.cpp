#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rasp/datagen.hpp"
#include "rasp/hierminer.hpp"
#include "rasp/report.hpp"
#include "rasp/typeminer.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

/// Taxonomy paths inside a schema file resolve relative to the schema file.
rasp::Schema load_schema_file(const fs::path& schema_path) {
  fs::path dir = schema_path.parent_path();
  return rasp::load_schema(read_text(schema_path), [&](const std::string& tax_path) {
    fs::path p(tax_path);
    return read_text(p.is_absolute() ? p : dir / p);
  });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MineArgs {
  std::string schema, data, out, min_support, report_path;
  int max_gap = rasp::kInf;
  int max_projected_length = rasp::kInf;
  int max_pattern_events = 10;
  int occ_cap = 0;
  int threads = 1;
  bool relationship_only = false;
  bool ban_uniform_runs = false;
};

int run_mine(const MineArgs& args) {
  auto t_total = std::chrono::steady_clock::now();
  rasp::Schema schema = load_schema_file(args.schema);
  std::vector<rasp::Sequence> db = rasp::load_database(read_text(args.data), schema);

  int theta = rasp::resolve_min_support(args.min_support, static_cast<int>(db.size()));
  if (theta < 1) {
    std::cerr << "error: resolved minimum support is " << theta << "; need at least 1\n";
    return 2;
  }

  rasp::MinerConfig cfg;
  cfg.theta = theta;
  cfg.mg = args.max_gap;
  cfg.mpl = args.max_projected_length;
  cfg.max_pattern_events = args.max_pattern_events;
  cfg.occ_cap = args.occ_cap;
  cfg.ban_uniform_runs = args.ban_uniform_runs;
  cfg.threads = args.threads;

  auto t_stage1 = std::chrono::steady_clock::now();
  rasp::TypeMineResult stage1 = rasp::mine_type_patterns(db, schema, cfg);
  double stage1_s = seconds_since(t_stage1);

  auto t_stage2 = std::chrono::steady_clock::now();
  std::vector<rasp::RefinementResult> results =
      rasp::refine_all(stage1.patterns, db, schema, theta, args.relationship_only, args.threads);
  double stage2_s = seconds_since(t_stage2);

  std::string pattern_file =
      rasp::format_pattern_file(results, schema, static_cast<int>(db.size()));
  if (args.out.empty())
    std::cout << pattern_file;
  else
    write_text(args.out, pattern_file);

  if (!args.report_path.empty()) {
    rasp::RunReport report;
    report.sequences = static_cast<int>(db.size());
    for (const rasp::Sequence& s : db) report.events += s.n_events();
    report.histogram = rasp::events_histogram(db);
    report.min_support_text = args.min_support;
    report.theta = theta;
    report.mg = cfg.mg;
    report.mpl = cfg.mpl;
    report.max_pattern_events = cfg.max_pattern_events;
    report.occ_cap = cfg.occ_cap;
    report.threads = cfg.threads;
    report.ban_uniform_runs = cfg.ban_uniform_runs;
    report.relationship_only = args.relationship_only;
    report.type_stage_seconds = stage1_s;
    report.refine_stage_seconds = stage2_s;
    report.total_seconds = seconds_since(t_total);
    report.type_patterns = static_cast<int>(stage1.patterns.size());
    for (const rasp::RefinementResult& r : results)
      report.refined_patterns += static_cast<int>(r.refinements.size());
    report.specialized_patterns = rasp::count_specialized(results);
    report.complete = stage1.complete;
    write_text(args.report_path, rasp::to_json(report));
  }
  return 0;
}

int run_stats(const std::string& schema_path, const std::string& data_path) {
  rasp::Schema schema = load_schema_file(schema_path);
  std::vector<rasp::Sequence> db = rasp::load_database(read_text(data_path), schema);

  long long total_events = 0;
  std::vector<long long> by_type(schema.n_event_types(), 0);
  for (const rasp::Sequence& s : db) {
    total_events += s.n_events();
    for (const rasp::Event& e : s.events) ++by_type[e.type];
  }
  std::cout << "sequences: " << db.size() << "\n";
  std::cout << "events: " << total_events << "\n";
  for (int t = 0; t < schema.n_event_types(); ++t)
    std::cout << "type " << schema.event_type(t).name << ": " << by_type[t] << "\n";
  for (const auto& [k, n] : rasp::events_histogram(db))
    std::cout << "events/sequence " << k << ": " << n << "\n";
  return 0;
}

struct GenArgs {
  uint64_t seed = 0;
  int sequences = 100;
  int events = 8;
  double geometric_mean = 0.0;  // > 0 switches to geometric lengths
  int event_types = 3;
  int branching = 2;
  int depth = 2;
  int rel_branching = 2;
  int rel_depth = 1;
  std::string rel_pairs = "chain";  // none | chain | all
  double rel_noise = 0.2;
  double txn_break = 0.4;
  std::string out_dir = ".";
};

int run_generate(const GenArgs& args) {
  rasp::GenSpec spec;
  spec.seed = args.seed;
  spec.n_sequences = args.sequences;
  spec.events_fixed = args.events;
  if (args.geometric_mean > 0.0) {
    spec.geometric_lengths = true;
    spec.events_mean = args.geometric_mean;
  }
  spec.n_event_types = args.event_types;
  spec.event_shape = {args.branching, args.depth};
  rasp::TaxShape rel_shape{args.rel_branching, args.rel_depth};
  if (args.rel_pairs == "chain") {
    for (int t = 0; t + 1 < args.event_types; ++t)
      spec.rels.push_back(rasp::RelShape{t, t + 1, rel_shape});
  } else if (args.rel_pairs == "all") {
    for (int a = 0; a < args.event_types; ++a)
      for (int b = a; b < args.event_types; ++b)
        spec.rels.push_back(rasp::RelShape{a, b, rel_shape});
  } else if (args.rel_pairs != "none") {
    std::cerr << "error: --rel-pairs must be none, chain, or all\n";
    return 2;
  }
  spec.rel_noise_prob = args.rel_noise;
  spec.txn_break_prob = args.txn_break;

  rasp::GeneratedData files = rasp::generate_db(spec);
  fs::path dir(args.out_dir);
  fs::create_directories(dir);
  for (const auto& [name, content] : files.taxonomy_files) write_text(dir / name, content);
  write_text(dir / "gen.schema", files.schema_text);
  write_text(dir / "gen.db", files.db_text);
  std::cout << "wrote " << (files.taxonomy_files.size() + 2) << " files to " << dir.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage miner for relationship-aware sequential patterns"};
  app.require_subcommand(1);

  MineArgs mine_args;
  CLI::App* mine = app.add_subcommand("mine", "Mine frequent patterns from a sequence database");
  mine->add_option("--schema", mine_args.schema, "Schema file")->required();
  mine->add_option("--data", mine_args.data, "Sequence database file")->required();
  mine->add_option("--out", mine_args.out, "Pattern output file (stdout when omitted)");
  mine->add_option("--min-support", mine_args.min_support,
                   "Absolute count, or fraction of the database when it contains a decimal point")
      ->required();
  mine->add_option("--max-gap", mine_args.max_gap, "Max ordinal gap between consecutive matches");
  mine->add_option("--max-projected-length", mine_args.max_projected_length,
                   "Max ordinal span of a match");
  mine->add_flag("--relationship-only", mine_args.relationship_only,
                 "Specialize relationship slots only");
  mine->add_option("--max-pattern-events", mine_args.max_pattern_events,
                   "Upper bound on events per pattern");
  mine->add_option("--occ-cap", mine_args.occ_cap,
                   "Keep at most this many occurrences per pattern and sequence");
  mine->add_flag("--ban-uniform-runs", mine_args.ban_uniform_runs,
                 "Drop candidate patterns of 3+ events of one type");
  mine->add_option("--threads", mine_args.threads, "Worker threads");
  mine->add_option("--report", mine_args.report_path, "Write a JSON run report here");

  std::string stats_schema, stats_data;
  CLI::App* stats = app.add_subcommand("stats", "Print dataset statistics");
  stats->add_option("--schema", stats_schema, "Schema file")->required();
  stats->add_option("--data", stats_data, "Sequence database file")->required();

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  gen->add_option("--seed", gen_args.seed, "PRNG seed")->required();
  gen->add_option("--sequences", gen_args.sequences, "Number of sequences");
  gen->add_option("--events", gen_args.events, "Events per sequence");
  gen->add_option("--geometric-mean", gen_args.geometric_mean,
                  "Draw sequence lengths geometrically with this mean");
  gen->add_option("--event-types", gen_args.event_types, "Number of event types");
  gen->add_option("--branching", gen_args.branching, "Event taxonomy branching");
  gen->add_option("--depth", gen_args.depth, "Event taxonomy depth");
  gen->add_option("--rel-branching", gen_args.rel_branching, "Relationship taxonomy branching");
  gen->add_option("--rel-depth", gen_args.rel_depth, "Relationship taxonomy depth");
  gen->add_option("--rel-pairs", gen_args.rel_pairs, "Type pairs with relationships: none|chain|all");
  gen->add_option("--rel-noise", gen_args.rel_noise, "Random relationship probability");
  gen->add_option("--txn-break", gen_args.txn_break, "Transaction boundary probability");
  gen->add_option("--out-dir", gen_args.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (mine->parsed()) return run_mine(mine_args);
    if (stats->parsed()) return run_stats(stats_schema, stats_data);
    if (gen->parsed()) return run_generate(gen_args);
  } catch (const rasp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
