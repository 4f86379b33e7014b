#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "sciret/metrics.hpp"
#include "sciret/pipeline.hpp"

namespace sciret {

nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json reports_to_json(const std::vector<EvalReport>& reports);

/// Plain-text table, one row per report in the given order. Columns are
/// MRR@1, MRR@5, Success@30 and Success@100 in percent; a cell is "-" when
/// the cutoff exceeds the evaluated list length.
std::string format_report_table(const std::vector<EvalReport>& reports);

/// Longer per-report summary: every cutoff plus stage recall.
std::string format_report_detail(const EvalReport& report);

/// TSV `post_id<TAB>preds`, preds like ['a', 'b'] with up to five ids.
/// Throws before touching the file when there are no results or a query has
/// no predictions.
void write_submission(const std::vector<QueryResult>& results, const std::filesystem::path& path);

std::string format_search_results(const std::vector<QueryResult>& results);

/// TSV `query_id<TAB>rank<TAB>doc_id<TAB>score` for every ranked document.
void write_search_results(const std::vector<QueryResult>& results,
                          const std::filesystem::path& path);

/// Writes `text` to `path`, throwing DataError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sciret
