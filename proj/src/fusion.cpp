#include "sciret/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "sciret/errors.hpp"

namespace sciret {
namespace {

void require_unique(const std::vector<Candidate>& list, const char* branch) {
  std::unordered_set<std::string_view> seen;
  for (const auto& c : list) {
    if (!seen.insert(c.doc_id).second) {
      throw DataError(std::string(branch) + " candidates repeat doc id '" + c.doc_id + "'");
    }
  }
}

}  // namespace

std::vector<Candidate> merge_candidates(const std::vector<Candidate>& lexical,
                                        const std::vector<Candidate>& semantic) {
  require_unique(lexical, "lexical");
  require_unique(semantic, "semantic");

  std::vector<Candidate> merged;
  merged.reserve(lexical.size() + semantic.size());
  std::unordered_map<std::string_view, std::size_t> slot;

  for (std::size_t i = 0; i < semantic.size(); ++i) {
    Candidate c;
    c.doc_id = semantic[i].doc_id;
    c.sources = static_cast<unsigned>(Source::semantic);
    c.semantic_rank = semantic[i].semantic_rank.value_or(i + 1);
    c.semantic_score = semantic[i].semantic_score;
    merged.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < merged.size(); ++i) slot.emplace(merged[i].doc_id, i);

  for (std::size_t i = 0; i < lexical.size(); ++i) {
    const auto& src = lexical[i];
    const std::size_t rank = src.lexical_rank.value_or(i + 1);
    const auto it = slot.find(src.doc_id);
    if (it != slot.end()) {
      auto& c = merged[it->second];
      c.sources |= static_cast<unsigned>(Source::lexical);
      c.lexical_rank = rank;
      c.lexical_score = src.lexical_score;
      continue;
    }
    Candidate c;
    c.doc_id = src.doc_id;
    c.sources = static_cast<unsigned>(Source::lexical);
    c.lexical_rank = rank;
    c.lexical_score = src.lexical_score;
    merged.push_back(std::move(c));
  }
  return merged;
}

void RrfParams::validate() const {
  if (!(rank_constant > 0.0) || !std::isfinite(rank_constant)) {
    throw UsageError("RRF rank constant must be positive");
  }
  if (window == 0) throw UsageError("RRF window must be >= 1");
}

std::vector<ScoredDoc> rrf_fuse(const std::vector<std::vector<std::string>>& lists,
                                const RrfParams& params) {
  params.validate();
  std::unordered_map<std::string, std::vector<std::size_t>> ranks;
  for (const auto& list : lists) {
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!seen.insert(list[i]).second) {
        throw DataError("RRF input list repeats doc id '" + list[i] + "'");
      }
      if (i < params.window) ranks[list[i]].push_back(i + 1);
    }
  }

  std::vector<ScoredDoc> fused;
  fused.reserve(ranks.size());
  for (auto& [doc, rs] : ranks) {
    std::sort(rs.begin(), rs.end());
    double score = 0.0;
    for (std::size_t r : rs) score += 1.0 / (params.rank_constant + static_cast<double>(r));
    fused.push_back({doc, score});
  }
  std::sort(fused.begin(), fused.end(),
            [](const ScoredDoc& a, const ScoredDoc& b) { return ranks_before(a, b); });
  return fused;
}

std::vector<std::string> ids_of(const std::vector<Candidate>& ranked) {
  std::vector<std::string> ids;
  ids.reserve(ranked.size());
  for (const auto& c : ranked) ids.push_back(c.doc_id);
  return ids;
}

std::vector<std::string> ids_of(const std::vector<ScoredDoc>& ranked) {
  std::vector<std::string> ids;
  ids.reserve(ranked.size());
  for (const auto& d : ranked) ids.push_back(d.doc_id);
  return ids;
}

}  // namespace sciret
