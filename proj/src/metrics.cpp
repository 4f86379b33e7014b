#include "sciret/metrics.hpp"

#include <algorithm>
#include <unordered_set>

#include "sciret/errors.hpp"

namespace sciret {
namespace {

void check_inputs(const std::vector<RankedIds>& results,
                  const std::vector<std::optional<std::string>>& golds) {
  if (results.size() != golds.size()) {
    throw DataError("metrics: " + std::to_string(results.size()) + " result lists for " +
                    std::to_string(golds.size()) + " golds");
  }
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (!golds[i]) {
      throw DataError("metrics: query " + std::to_string(i) + " has no gold document");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& id : results[i]) {
      if (!seen.insert(id).second) {
        throw DataError("metrics: ranked list " + std::to_string(i) + " repeats '" + id + "'");
      }
    }
  }
}

}  // namespace

std::optional<std::size_t> gold_rank(const RankedIds& ranked, std::string_view gold) {
  const auto it = std::find(ranked.begin(), ranked.end(), gold);
  if (it == ranked.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ranked.begin()) + 1;
}

double reciprocal_rank_at_k(const RankedIds& ranked, std::string_view gold, std::size_t k) {
  const auto r = gold_rank(ranked, gold);
  if (!r || *r > k) return 0.0;
  return 1.0 / static_cast<double>(*r);
}

double mrr_at_k(const std::vector<RankedIds>& results,
                const std::vector<std::optional<std::string>>& golds, std::size_t k) {
  check_inputs(results, golds);
  if (results.empty()) throw DataError("metric over an empty query set");
  double sum = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    sum += reciprocal_rank_at_k(results[i], *golds[i], k);
  }
  return sum / static_cast<double>(results.size());
}

double success_at_k(const std::vector<RankedIds>& results,
                    const std::vector<std::optional<std::string>>& golds, std::size_t k) {
  check_inputs(results, golds);
  if (results.empty()) throw DataError("metric over an empty query set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto r = gold_rank(results[i], *golds[i]);
    if (r && *r <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

EvalReport evaluate_rankings(const std::vector<std::string>& query_ids,
                             const std::vector<RankedIds>& results,
                             const std::vector<std::optional<std::string>>& golds) {
  check_inputs(results, golds);
  if (query_ids.size() != results.size()) throw DataError("metrics: query id count mismatch");
  EvalReport report;
  for (std::size_t i = 0; i < results.size(); ++i) {
    report.depth = std::max(report.depth, results[i].size());
    QueryEval qe;
    qe.query_id = query_ids[i];
    qe.gold_rank = gold_rank(results[i], *golds[i]);
    qe.reciprocal_rank = reciprocal_rank_at_k(results[i], *golds[i], kPrimaryCutoff);
    report.per_query.push_back(std::move(qe));
  }
  for (std::size_t k : kReportCutoffs) {
    report.mrr[k] = mrr_at_k(results, golds, k);
    report.success[k] = success_at_k(results, golds, k);
  }
  return report;
}

}  // namespace sciret
