// Independent reference implementations. Written for clarity, not speed, and
// sharing no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Ranked {
  std::string id;
  double score;
};

inline void sort_ranked(std::vector<Ranked>& v) {
  std::sort(v.begin(), v.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
}

// Okapi BM25 scored document by document from raw token lists.
inline std::vector<double> bm25_all(const std::vector<std::vector<std::string>>& docs,
                                    const std::vector<std::string>& query, double k1, double b) {
  const double n = static_cast<double>(docs.size());
  double total = 0;
  for (const auto& d : docs) total += static_cast<double>(d.size());
  const double avgdl = total / n;
  std::vector<double> scores(docs.size(), 0.0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    std::vector<double> parts;
    for (const auto& term : query) {
      double df = 0;
      for (const auto& other : docs) {
        if (std::find(other.begin(), other.end(), term) != other.end()) df += 1;
      }
      const double tf = static_cast<double>(std::count(d.begin(), d.end(), term));
      if (df == 0 || tf == 0) continue;
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double len = static_cast<double>(d.size());
      parts.push_back(idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avgdl)));
    }
    std::sort(parts.begin(), parts.end());
    for (double x : parts) scores[i] += x;
  }
  return scores;
}

// Lexical ranking key: the score on a grid of 2^-40 relative spacing, so
// scores equal up to rounding noise are ties.
inline double lexical_key(double score) {
  if (score == 0) return 0;
  const double grid = std::pow(2.0, std::floor(std::log2(std::fabs(score))) + 1 - 40);
  return std::nearbyint(score / grid) * grid;
}

// Positive-score documents ordered by (lexical_key desc, id asc), truncated to k.
inline std::vector<Ranked> topk_positive(const std::vector<std::string>& ids,
                                         const std::vector<double>& scores, std::size_t k) {
  std::vector<Ranked> all;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (scores[i] > 0) all.push_back({ids[i], scores[i]});
  }
  std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
    const double ka = lexical_key(a.score), kb = lexical_key(b.score);
    return ka != kb ? ka > kb : a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// Exhaustive scan: every row scored, best row per document, full sort.
inline std::vector<Ranked> dense_topk(const std::vector<std::vector<float>>& rows,
                                      const std::vector<std::string>& row_doc,
                                      const std::vector<float>& q, std::size_t k) {
  std::map<std::string, double> best;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) s += double(rows[r][i]) * double(q[i]);
    auto it = best.find(row_doc[r]);
    if (it == best.end()) {
      best.emplace(row_doc[r], s);
    } else {
      it->second = std::max(it->second, s);
    }
  }
  std::vector<Ranked> all;
  for (const auto& [id, s] : best) all.push_back({id, s});
  sort_ranked(all);
  if (all.size() > k) all.resize(k);
  return all;
}

// Reciprocal rank fusion by direct summation over every (list, position).
inline std::vector<Ranked> rrf(const std::vector<std::vector<std::string>>& lists, double kappa,
                               std::size_t window) {
  std::set<std::string> ids;
  for (const auto& l : lists) {
    for (std::size_t p = 0; p < l.size() && p < window; ++p) ids.insert(l[p]);
  }
  std::vector<Ranked> out;
  for (const auto& id : ids) {
    double s = 0;
    for (const auto& l : lists) {
      for (std::size_t p = 0; p < l.size() && p < window; ++p) {
        if (l[p] == id) s += 1.0 / (kappa + double(p + 1));
      }
    }
    out.push_back({id, s});
  }
  sort_ranked(out);
  return out;
}

// Exact rational arithmetic for metric checks.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac() = default;
  Frac(std::int64_t n, std::int64_t d) : num(n), den(d) {
    const auto g = std::gcd(num, den);
    if (g != 0) {
      num /= g;
      den /= g;
    }
  }
  Frac operator+(const Frac& o) const { return Frac(num * o.den + o.num * den, den * o.den); }
  Frac operator/(std::int64_t n) const { return Frac(num, den * n); }
  bool operator<=(const Frac& o) const { return num * o.den <= o.num * den; }
  bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
  double value() const { return double(num) / double(den); }
};

inline Frac reciprocal_rank(const std::vector<std::string>& ranked, const std::string& gold,
                            std::size_t k) {
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (ranked[i] == gold) return Frac(1, std::int64_t(i + 1));
  }
  return Frac(0, 1);
}

inline Frac mrr(const std::vector<std::vector<std::string>>& results,
                const std::vector<std::string>& golds, std::size_t k) {
  Frac sum;
  for (std::size_t q = 0; q < results.size(); ++q) sum = sum + reciprocal_rank(results[q], golds[q], k);
  return sum / std::int64_t(results.size());
}

inline Frac success(const std::vector<std::vector<std::string>>& results,
                    const std::vector<std::string>& golds, std::size_t k) {
  std::int64_t hits = 0;
  for (std::size_t q = 0; q < results.size(); ++q) {
    const auto& r = results[q];
    const auto end = r.begin() + std::ptrdiff_t(std::min(k, r.size()));
    if (std::find(r.begin(), end, golds[q]) != end) ++hits;
  }
  return Frac(hits, std::int64_t(results.size()));
}

// Code points of an ASCII/UTF-8 word, "</w>" on the last one.
inline std::vector<std::string> bpe_symbols(const std::string& word) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size();) {
    std::size_t len = 1;
    const auto c = static_cast<unsigned char>(word[i]);
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    out.push_back(word.substr(i, len));
    i += len;
  }
  if (!out.empty()) out.back() += "</w>";
  return out;
}

inline std::vector<std::string> merge_once(const std::vector<std::string>& syms,
                                           const std::pair<std::string, std::string>& p) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < syms.size();) {
    if (i + 1 < syms.size() && syms[i] == p.first && syms[i + 1] == p.second) {
      out.push_back(syms[i] + syms[i + 1]);
      i += 2;
    } else {
      out.push_back(syms[i]);
      ++i;
    }
  }
  return out;
}

// Greedy BPE that recounts every pair from scratch on each iteration.
inline std::vector<std::pair<std::string, std::string>> bpe_train(
    const std::map<std::string, long long>& word_freq, std::size_t vocab_size) {
  std::map<std::string, std::vector<std::string>> words;
  std::set<std::string> alphabet;
  for (const auto& [w, f] : word_freq) {
    words[w] = bpe_symbols(w);
    for (const auto& s : words[w]) alphabet.insert(s);
  }
  std::vector<std::pair<std::string, std::string>> merges;
  while (alphabet.size() + merges.size() < vocab_size) {
    std::map<std::pair<std::string, std::string>, long long> counts;
    for (const auto& [w, syms] : words) {
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) counts[{syms[i], syms[i + 1]}] += word_freq.at(w);
    }
    long long best_count = 0;
    std::pair<std::string, std::string> best;
    for (const auto& [p, c] : counts) {  // map order: smallest pair wins ties
      if (c > best_count) {
        best_count = c;
        best = p;
      }
    }
    if (best_count < 2) break;
    merges.push_back(best);
    for (auto& [w, syms] : words) syms = merge_once(syms, best);
  }
  return merges;
}

// Applies merges by priority: lowest-ranked adjacent pair first.
inline std::vector<std::string> bpe_segment(
    const std::string& word, const std::vector<std::pair<std::string, std::string>>& merges) {
  auto syms = bpe_symbols(word);
  for (;;) {
    std::size_t best = merges.size();
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      for (std::size_t r = 0; r < best; ++r) {
        if (merges[r].first == syms[i] && merges[r].second == syms[i + 1]) {
          best = r;
          break;
        }
      }
    }
    if (best == merges.size()) return syms;
    syms = merge_once(syms, merges[best]);
  }
}

}  // namespace oracle
