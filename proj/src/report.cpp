#include "rasp/report.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <json.hpp>

namespace rasp {

int resolve_min_support(const std::string& text, int n_sequences) {
  if (text.empty()) throw ParseError("empty min-support value");
  size_t dot = text.find('.');
  bool all_digits =
      std::all_of(text.begin(), text.end(),
                  [&](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; });
  if (!all_digits || text.find('.', dot == std::string::npos ? 0 : dot + 1) != std::string::npos)
    throw ParseError("min-support must be a count or a decimal fraction: " + text);

  if (dot == std::string::npos) {
    long long v = 0;
    for (char c : text) {
      v = v * 10 + (c - '0');
      if (v > 1'000'000'000LL) throw ParseError("min-support count out of range: " + text);
    }
    return static_cast<int>(v);
  }

  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  int frac_digits = static_cast<int>(text.size() - dot - 1);
  if (digits.empty()) throw ParseError("min-support must have digits: " + text);
  if (frac_digits > 12) throw ParseError("min-support fraction has too many digits: " + text);

  // theta = ceil(f * n) with f = digits / 10^frac_digits, all in integers
  unsigned __int128 num = 0;
  for (char c : digits) {
    num = num * 10 + static_cast<unsigned>(c - '0');
    if (num > (static_cast<unsigned __int128>(1) << 100))
      throw ParseError("min-support value out of range: " + text);
  }
  unsigned __int128 scale = 1;
  for (int i = 0; i < frac_digits; ++i) scale *= 10;
  unsigned __int128 theta =
      (num * static_cast<unsigned __int128>(n_sequences) + scale - 1) / scale;
  if (theta > 2'000'000'000u) throw ParseError("min-support threshold out of range: " + text);
  return static_cast<int>(theta);
}

std::string format_fraction(int support, int total) {
  if (total <= 0) return "0.0000";
  long long num = static_cast<long long>(support) * 10000;
  long long q = num / total;
  long long r = num % total;
  if (2 * r >= total) ++q;  // round half up
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%04lld", q / 10000, q % 10000);
  return buf;
}

std::string format_pattern_file(const std::vector<RefinementResult>& results,
                                const Schema& schema, int n_sequences) {
  struct Line {
    int events;
    std::string text;
    int support;
  };
  std::vector<Line> lines;
  for (const RefinementResult& res : results)
    for (const auto& [rp, sup] : res.refinements)
      lines.push_back({rp.base.n_events(), to_string(schema, rp), sup});
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.events != b.events) return a.events < b.events;
    return a.text < b.text;
  });
  std::string out;
  for (const Line& l : lines) {
    out += std::to_string(l.support);
    out += '\t';
    out += format_fraction(l.support, n_sequences);
    out += '\t';
    out += l.text;
    out += '\n';
  }
  return out;
}

std::vector<std::pair<int, int>> events_histogram(const std::vector<Sequence>& db) {
  std::map<int, int> bins;
  for (const Sequence& s : db) ++bins[s.n_events()];
  return {bins.begin(), bins.end()};
}

int count_specialized(const std::vector<RefinementResult>& results) {
  int n = 0;
  for (const RefinementResult& res : results)
    for (const auto& [rp, sup] : res.refinements)
      if (std::any_of(rp.slots.begin(), rp.slots.end(), [](int c) { return c != 0; })) ++n;
  return n;
}

std::string to_json(const RunReport& report) {
  nlohmann::json j;
  j["input"]["sequences"] = report.sequences;
  j["input"]["events"] = report.events;
  auto& hist = j["input"]["events_per_sequence"];
  hist = nlohmann::json::array();
  for (const auto& [k, v] : report.histogram) hist.push_back({k, v});

  auto& p = j["parameters"];
  p["min_support"] = report.min_support_text;
  p["theta"] = report.theta;
  p["max_gap"] = report.mg == kInf ? nlohmann::json() : nlohmann::json(report.mg);
  p["max_projected_length"] = report.mpl == kInf ? nlohmann::json() : nlohmann::json(report.mpl);
  p["max_pattern_events"] = report.max_pattern_events;
  p["occ_cap"] = report.occ_cap == 0 ? nlohmann::json() : nlohmann::json(report.occ_cap);
  p["ban_uniform_runs"] = report.ban_uniform_runs;
  p["relationship_only"] = report.relationship_only;
  p["threads"] = report.threads;

  j["timings"]["type_pattern_stage_seconds"] = report.type_stage_seconds;
  j["timings"]["refinement_stage_seconds"] = report.refine_stage_seconds;
  j["timings"]["total_seconds"] = report.total_seconds;

  j["patterns"]["type_patterns"] = report.type_patterns;
  j["patterns"]["refined"] = report.refined_patterns;
  j["patterns"]["specialized_beyond_root"] = report.specialized_patterns;
  j["complete"] = report.complete;
  return j.dump(2) + "\n";
}

}  // namespace rasp
