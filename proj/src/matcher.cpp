#include "rasp/matcher.hpp"

#include <algorithm>

namespace rasp {

TypeMultiset type_multiset(int n_types, const std::vector<int>& event_types) {
  TypeMultiset m;
  m.counts.assign(n_types, 0);
  for (int t : event_types) ++m.counts.at(t);
  return m;
}

bool multiset_prune(const TypeMultiset& m_seq, const TypeMultiset& m_pat) {
  if (m_seq.counts.size() != m_pat.counts.size())
    throw std::invalid_argument("type multisets cover different type universes");
  for (size_t t = 0; t < m_pat.counts.size(); ++t)
    if (m_seq.counts[t] - m_pat.counts[t] < 0) return true;
  return false;
}

std::vector<std::vector<int>> find_all_occurrences(const TypePattern& pat, const Sequence& seq,
                                                   int mg, int mpl) {
  int p = pat.n_events();
  int n = seq.n_events();
  if (p == 0) throw std::invalid_argument("empty pattern");
  std::vector<std::vector<int>> out;
  if (p > n) return out;

  // Whole-sequence type-count screen, then per-position remaining counts.
  // Both compare only the types the pattern actually uses.
  std::vector<int> pat_types(pat.types);
  std::sort(pat_types.begin(), pat_types.end());
  pat_types.erase(std::unique(pat_types.begin(), pat_types.end()), pat_types.end());
  int d = static_cast<int>(pat_types.size());
  auto type_slot = [&](int t) {
    auto it = std::lower_bound(pat_types.begin(), pat_types.end(), t);
    return it != pat_types.end() && *it == t ? static_cast<int>(it - pat_types.begin()) : -1;
  };

  // suffix[s*(n+2) + j] = events of type pat_types[s] at ordinals >= j
  std::vector<int> suffix(static_cast<size_t>(d) * (n + 2), 0);
  for (int j = n; j >= 1; --j)
    for (int s = 0; s < d; ++s) {
      int cnt = suffix[static_cast<size_t>(s) * (n + 2) + j + 1];
      if (seq.events[j - 1].type == pat_types[s]) ++cnt;
      suffix[static_cast<size_t>(s) * (n + 2) + j] = cnt;
    }
  // need[i*d + s] = pattern events i..p-1 of type pat_types[s]
  std::vector<int> need(static_cast<size_t>(p + 1) * d, 0);
  for (int i = p - 1; i >= 0; --i) {
    for (int s = 0; s < d; ++s) need[static_cast<size_t>(i) * d + s] = need[(i + 1) * d + s];
    ++need[static_cast<size_t>(i) * d + type_slot(pat.types[i])];
  }
  for (int s = 0; s < d; ++s)
    if (suffix[static_cast<size_t>(s) * (n + 2) + 1] < need[s]) return out;  // multiset deficit

  auto feasible = [&](int i, int j) {
    for (int s = 0; s < d; ++s)
      if (need[static_cast<size_t>(i) * d + s] > suffix[static_cast<size_t>(s) * (n + 2) + j])
        return false;
    return true;
  };

  // Depth-first search over (pattern position i, next sequence ordinal j);
  // descending on a match before resuming the scan yields lexicographic
  // emission order.
  struct Frame {
    int i, j;
  };
  std::vector<Frame> stack{{0, 1}};
  std::vector<int> lambda;
  while (!stack.empty()) {
    Frame& f = stack.back();
    int i = f.i;
    bool descended = false;
    while (f.j <= n) {
      int j = f.j++;
      if (i > 0) {
        if (mg != kInf && j - lambda[i - 1] > mg) break;
        if (mpl != kInf && j - lambda[0] > mpl) break;
        bool sep_p = pat.sep_after(i - 1);
        bool sep_s = seq.separated(lambda[i - 1] - 1, j - 1);
        if (sep_s && !sep_p) break;  // separator crossed that the pattern lacks
        if (sep_p && !sep_s) continue;  // separator still ahead
      }
      if (!feasible(i, j)) break;  // remaining events cannot cover the pattern tail
      if (seq.events[j - 1].type != pat.types[i]) continue;
      lambda.push_back(j);
      if (i + 1 == p) {
        out.push_back(lambda);
        lambda.pop_back();
        continue;
      }
      stack.push_back({i + 1, j + 1});
      descended = true;
      break;
    }
    if (descended) continue;
    stack.pop_back();
    if (i > 0) lambda.pop_back();
  }
  return out;
}

namespace {

constexpr unsigned long long kSat = std::numeric_limits<unsigned long long>::max();

unsigned long long binom_sat(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);  // exact: C(n-k+i, i)
    if (r > kSat) return kSat;
  }
  return static_cast<unsigned long long>(r);
}

unsigned long long mul_sat(unsigned long long a, unsigned long long b) {
  if (a != 0 && b > kSat / a) return kSat;
  return a * b;
}

}  // namespace

unsigned long long count_occurrences_bound(int n, int k, int g, int w) {
  if (n < k || k < 1) throw std::invalid_argument("need n >= k >= 1");
  unsigned long long best = binom_sat(n, k);
  if (g != kInf) {
    unsigned long long pw = 1;
    for (int i = 0; i < k - 1; ++i) pw = mul_sat(pw, static_cast<unsigned long long>(g - 1));
    best = std::min(best, mul_sat(pw, static_cast<unsigned long long>(n - k)));
  }
  if (w != kInf)
    best = std::min(best, mul_sat(binom_sat(w, k - 1), static_cast<unsigned long long>(n - k)));
  return best;
}

}  // namespace rasp
