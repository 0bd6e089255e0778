#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rasp/report.hpp"

namespace fs = std::filesystem;
using namespace rasp;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("rasp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  fs::path so = dir / "_stdout.txt";
  fs::path se = dir / "_stderr.txt";
  std::string cmd =
      std::string(RASP_CLI_PATH) + " " + args + " >" + so.string() + " 2>" + se.string();
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(so), slurp(se)};
}

// Tiny dataset with one specializable event slot and one relationship slot.
void write_dataset(const fs::path& dir) {
  spit(dir / "bug.tax", "(Microbe(GramPos,GramNeg))\n");
  spit(dir / "sir.tax", "(Any(Tested(Resistant,Susceptible)))\n");
  spit(dir / "schema.txt",
       "taxonomy Bug bug.tax\n"
       "taxonomy SIR sir.tax\n"
       "eventtype B Bug\n"
       "eventtype T\n"
       "reltype B T SIR\n");
  spit(dir / "db.txt",
       "seq s1\ne B GramPos\ne T\nr 2 1 Resistant\nend\n"
       "seq s2\ne B GramPos\ne T\nr 2 1 Resistant\nend\n"
       "seq s3\ne B GramNeg\ne T\nend\n");
}

}  // namespace

TEST_CASE("min-support text resolves exactly") {
  CHECK(resolve_min_support("0.045", 6659) == 300);
  CHECK(resolve_min_support("0.09", 6659) == 600);  // ceil(599.31)
  CHECK(resolve_min_support("300", 6659) == 300);
  CHECK(resolve_min_support("1", 10) == 1);
  CHECK(resolve_min_support("0.5", 3) == 2);
  CHECK(resolve_min_support("1.0", 7) == 7);
  CHECK(resolve_min_support("0.0", 7) == 0);
  CHECK(resolve_min_support("0.3333333333", 3) == 1);
  CHECK_THROWS_AS(resolve_min_support("", 5), ParseError);
  CHECK_THROWS_AS(resolve_min_support("1.2.3", 5), ParseError);
  CHECK_THROWS_AS(resolve_min_support("abc", 5), ParseError);
  CHECK_THROWS_AS(resolve_min_support("-3", 5), ParseError);
}

TEST_CASE("support fractions round half up at four decimals") {
  CHECK(format_fraction(1, 3) == "0.3333");
  CHECK(format_fraction(2, 3) == "0.6667");
  CHECK(format_fraction(1, 2) == "0.5000");
  CHECK(format_fraction(5, 5) == "1.0000");
  CHECK(format_fraction(0, 5) == "0.0000");
  CHECK(format_fraction(300, 6659) == "0.0451");
  CHECK(format_fraction(1, 20000) == "0.0001");  // exactly half rounds up
}

TEST_CASE("mine writes the expected pattern file") {
  fs::path dir = scratch_dir("mine");
  write_dataset(dir);
  RunResult r = run_cli("mine --schema " + (dir / "schema.txt").string() + " --data " +
                            (dir / "db.txt").string() + " --min-support 2 --out " +
                            (dir / "patterns.txt").string(),
                        dir);
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "patterns.txt") ==
        "2\t0.6667\tB(GramPos)\n"
        "3\t1.0000\tT()\n"
        "2\t0.6667\tB(GramPos) T() | r(2,1)=[Resistant]\n");

  SUBCASE("relationship-only specializes relationship slots only") {
    RunResult rel = run_cli("mine --schema " + (dir / "schema.txt").string() + " --data " +
                                (dir / "db.txt").string() +
                                " --min-support 2 --relationship-only --out " +
                                (dir / "rel.txt").string(),
                            dir);
    REQUIRE(rel.code == 0);
    CHECK(slurp(dir / "rel.txt") ==
          "3\t1.0000\tB(Microbe)\n"
          "3\t1.0000\tT()\n"
          "2\t0.6667\tB(Microbe) T() | r(2,1)=[Resistant]\n");
  }

  SUBCASE("fractional min-support maps through the sequence count") {
    // 0.5 of 3 sequences -> theta 2: same output as --min-support 2
    RunResult frac = run_cli("mine --schema " + (dir / "schema.txt").string() + " --data " +
                                 (dir / "db.txt").string() + " --min-support 0.5 --out " +
                                 (dir / "frac.txt").string(),
                             dir);
    REQUIRE(frac.code == 0);
    CHECK(slurp(dir / "frac.txt") == slurp(dir / "patterns.txt"));
  }
}

TEST_CASE("pattern output is byte-identical across runs and thread counts") {
  fs::path dir = scratch_dir("determinism");
  write_dataset(dir);
  std::string base = "mine --schema " + (dir / "schema.txt").string() + " --data " +
                     (dir / "db.txt").string() + " --min-support 1 --out ";
  REQUIRE(run_cli(base + (dir / "p1.txt").string(), dir).code == 0);
  REQUIRE(run_cli(base + (dir / "p2.txt").string(), dir).code == 0);
  REQUIRE(run_cli(base + (dir / "p3.txt").string() + " --threads 4", dir).code == 0);
  std::string first = slurp(dir / "p1.txt");
  CHECK(first == slurp(dir / "p2.txt"));
  CHECK(first == slurp(dir / "p3.txt"));
  CHECK(!first.empty());
}

TEST_CASE("run report carries counts, parameters, and stage times") {
  fs::path dir = scratch_dir("report");
  write_dataset(dir);
  RunResult r = run_cli("mine --schema " + (dir / "schema.txt").string() + " --data " +
                            (dir / "db.txt").string() + " --min-support 0.5 --max-gap 3 --out " +
                            (dir / "p.txt").string() + " --report " + (dir / "rep.json").string(),
                        dir);
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(dir / "rep.json"));
  CHECK(j["input"]["sequences"] == 3);
  CHECK(j["input"]["events"] == 6);
  CHECK(j["input"]["events_per_sequence"] == nlohmann::json::array({{2, 3}}));
  CHECK(j["parameters"]["min_support"] == "0.5");
  CHECK(j["parameters"]["theta"] == 2);
  CHECK(j["parameters"]["max_gap"] == 3);
  CHECK(j["parameters"]["max_projected_length"].is_null());
  CHECK(j["parameters"]["occ_cap"].is_null());
  CHECK(j["patterns"]["type_patterns"] == 3);
  CHECK(j["patterns"]["refined"] == 3);
  CHECK(j["patterns"]["specialized_beyond_root"] == 2);
  CHECK(j["complete"] == true);
  double s1 = j["timings"]["type_pattern_stage_seconds"];
  double s2 = j["timings"]["refinement_stage_seconds"];
  double total = j["timings"]["total_seconds"];
  CHECK(s1 >= 0.0);
  CHECK(s2 >= 0.0);
  CHECK(s1 + s2 <= total);
}

TEST_CASE("parse errors exit 1 with a line-numbered message") {
  fs::path dir = scratch_dir("errors");
  write_dataset(dir);
  spit(dir / "bad.txt", "seq s1\ne X\nend\n");
  RunResult r = run_cli("mine --schema " + (dir / "schema.txt").string() + " --data " +
                            (dir / "bad.txt").string() + " --min-support 1",
                        dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);

  SUBCASE("infeasible threshold exits 2") {
    RunResult z = run_cli("mine --schema " + (dir / "schema.txt").string() + " --data " +
                              (dir / "db.txt").string() + " --min-support 0.0",
                          dir);
    CHECK(z.code == 2);
  }

  SUBCASE("missing file exits 1") {
    RunResult m = run_cli("mine --schema " + (dir / "schema.txt").string() + " --data " +
                              (dir / "nope.txt").string() + " --min-support 1",
                          dir);
    CHECK(m.code == 1);
  }
}

TEST_CASE("stats prints counts and histogram") {
  fs::path dir = scratch_dir("stats");
  write_dataset(dir);
  RunResult r = run_cli(
      "stats --schema " + (dir / "schema.txt").string() + " --data " + (dir / "db.txt").string(),
      dir);
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "sequences: 3\n"
        "events: 6\n"
        "type B: 3\n"
        "type T: 3\n"
        "events/sequence 2: 3\n");

  SUBCASE("empty database reports zeros") {
    spit(dir / "empty.txt", "");
    RunResult e = run_cli("stats --schema " + (dir / "schema.txt").string() + " --data " +
                              (dir / "empty.txt").string(),
                          dir);
    REQUIRE(e.code == 0);
    CHECK(e.out ==
          "sequences: 0\n"
          "events: 0\n"
          "type B: 0\n"
          "type T: 0\n");
  }
}

TEST_CASE("generate emits a mineable dataset deterministically") {
  fs::path d1 = scratch_dir("gen1");
  fs::path d2 = scratch_dir("gen2");
  std::string flags = "generate --seed 11 --sequences 12 --events 5 --event-types 2 --out-dir ";
  REQUIRE(run_cli(flags + d1.string(), d1).code == 0);
  REQUIRE(run_cli(flags + d2.string(), d2).code == 0);
  CHECK(slurp(d1 / "gen.db") == slurp(d2 / "gen.db"));
  CHECK(slurp(d1 / "gen.schema") == slurp(d2 / "gen.schema"));

  RunResult mined = run_cli("mine --schema " + (d1 / "gen.schema").string() + " --data " +
                                (d1 / "gen.db").string() + " --min-support 3",
                            d1);
  CHECK(mined.code == 0);
  CHECK(!mined.out.empty());

  SUBCASE("zero sequences is valid") {
    fs::path d0 = scratch_dir("gen0");
    REQUIRE(run_cli("generate --seed 3 --sequences 0 --out-dir " + d0.string(), d0).code == 0);
    CHECK(slurp(d0 / "gen.db").empty());
  }

  SUBCASE("bad generator shape exits 2") {
    fs::path db = scratch_dir("genbad");
    CHECK(run_cli("generate --seed 3 --event-types 0 --out-dir " + db.string(), db).code == 2);
  }
}
