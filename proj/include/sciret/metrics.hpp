#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sciret {

/// Cutoffs reported for both MRR@k and Success@k.
inline constexpr std::array<std::size_t, 6> kReportCutoffs = {1, 5, 10, 20, 30, 100};

using RankedIds = std::vector<std::string>;

/// 1-based position of `gold` in `ranked`, if present.
std::optional<std::size_t> gold_rank(const RankedIds& ranked, std::string_view gold);

/// 1/r when gold sits at position r <= k, else 0.
double reciprocal_rank_at_k(const RankedIds& ranked, std::string_view gold, std::size_t k);

/// Mean reciprocal rank at k. Throws DataError when a gold is missing, the
/// sizes differ, or a ranked list repeats an id.
double mrr_at_k(const std::vector<RankedIds>& results,
                const std::vector<std::optional<std::string>>& golds, std::size_t k);

/// Fraction of queries whose gold appears in the top k (reported under the
/// name Precision@k as well, since each query has exactly one gold).
double success_at_k(const std::vector<RankedIds>& results,
                    const std::vector<std::optional<std::string>>& golds, std::size_t k);

struct QueryEval {
  std::string query_id;
  std::optional<std::size_t> gold_rank;
  /// Reciprocal rank at the primary cutoff (5).
  double reciprocal_rank = 0.0;
};

/// Per-query reciprocal ranks and aggregate metrics for one configuration.
struct EvalReport {
  std::string label;
  std::string config_fingerprint;
  /// Longest ranked list evaluated; Success@k beyond it is not meaningful.
  std::size_t depth = 0;
  std::vector<QueryEval> per_query;
  std::map<std::size_t, double> mrr;
  std::map<std::size_t, double> success;

  // Stage-level recall, present when the stage ran.
  std::optional<std::size_t> lexical_k;
  std::optional<double> lexical_success;
  std::optional<std::size_t> semantic_k;
  std::optional<double> semantic_success;
  std::optional<std::size_t> candidate_count;
  std::optional<double> candidate_recall;
};

inline constexpr std::size_t kPrimaryCutoff = 5;

/// Builds the report body (per-query ranks, MRR and Success at every
/// reporting cutoff).
EvalReport evaluate_rankings(const std::vector<std::string>& query_ids,
                             const std::vector<RankedIds>& results,
                             const std::vector<std::optional<std::string>>& golds);

}  // namespace sciret
