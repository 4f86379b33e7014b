#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace sciret {

enum class Source : unsigned { lexical = 1U, semantic = 2U };

/// A document flowing from a retrieval branch into fusion and re-ranking.
/// Ranks are 1-based. A source flag is set exactly when its rank is present.
struct Candidate {
  std::string doc_id;
  unsigned sources = 0;
  std::optional<std::size_t> lexical_rank;
  std::optional<std::size_t> semantic_rank;
  std::optional<double> lexical_score;
  std::optional<double> semantic_score;

  bool has(Source s) const { return (sources & static_cast<unsigned>(s)) != 0; }

  /// Branch score for single-source candidates.
  double branch_score() const {
    if (lexical_score) return *lexical_score;
    return semantic_score.value_or(0.0);
  }

  bool operator==(const Candidate&) const = default;
};

/// A document with its final score after fusion or re-ranking.
struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

/// Score descending, then doc_id ascending. Used for every ranking.
inline bool ranks_before(double score_a, std::string_view id_a, double score_b,
                         std::string_view id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  return ranks_before(a.score, a.doc_id, b.score, b.doc_id);
}

}  // namespace sciret
