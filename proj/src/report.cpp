#include "sciret/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sciret/errors.hpp"

namespace sciret {
namespace {

constexpr std::size_t kSubmissionIds = 5;

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string cell(const std::map<std::size_t, double>& m, std::size_t k, std::size_t depth) {
  if (k > depth) return "-";
  auto it = m.find(k);
  return it == m.end() ? "-" : percent(it->second);
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

nlohmann::json metric_map(const std::map<std::size_t, double>& m) {
  auto out = nlohmann::json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["label"] = report.label;
  j["config_fingerprint"] = report.config_fingerprint;
  j["depth"] = report.depth;
  j["mrr"] = metric_map(report.mrr);
  j["success"] = metric_map(report.success);
  if (report.lexical_k) {
    j["lexical_k"] = *report.lexical_k;
    j["lexical_success"] = *report.lexical_success;
  }
  if (report.semantic_k) {
    j["semantic_k"] = *report.semantic_k;
    j["semantic_success"] = *report.semantic_success;
  }
  if (report.candidate_count) {
    j["candidate_count"] = *report.candidate_count;
    j["candidate_recall"] = *report.candidate_recall;
  }
  auto per_query = nlohmann::json::array();
  for (const auto& q : report.per_query) {
    nlohmann::json row;
    row["query_id"] = q.query_id;
    row["gold_rank"] = q.gold_rank ? nlohmann::json(*q.gold_rank) : nlohmann::json(nullptr);
    row["reciprocal_rank"] = q.reciprocal_rank;
    per_query.push_back(std::move(row));
  }
  j["per_query"] = std::move(per_query);
  return j;
}

nlohmann::json reports_to_json(const std::vector<EvalReport>& reports) {
  auto out = nlohmann::json::array();
  for (const auto& r : reports) out.push_back(report_to_json(r));
  return out;
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::size_t label_width = 6;
  for (const auto& r : reports) label_width = std::max(label_width, r.label.size());

  std::ostringstream os;
  os << std::string(label_width - 6, ' ') << "config" << pad("MRR@1", 9) << pad("MRR@5", 9)
     << pad("S/P@30", 9) << pad("S/P@100", 9) << "  fingerprint\n";
  for (const auto& r : reports) {
    os << pad(r.label, label_width) << pad(cell(r.mrr, 1, r.depth), 9)
       << pad(cell(r.mrr, 5, r.depth), 9) << pad(cell(r.success, 30, r.depth), 9)
       << pad(cell(r.success, 100, r.depth), 9) << "  " << r.config_fingerprint << '\n';
  }
  return os.str();
}

std::string format_report_detail(const EvalReport& report) {
  std::ostringstream os;
  os << report.label << " (" << report.per_query.size() << " queries, depth " << report.depth
     << ", config " << report.config_fingerprint << ")\n";
  for (std::size_t k : kReportCutoffs) {
    os << "  @" << k << ": MRR " << cell(report.mrr, k, report.depth)
       << "  Success/Precision " << cell(report.success, k, report.depth) << '\n';
  }
  if (report.lexical_k) {
    os << "  lexical success@" << *report.lexical_k << ": " << percent(*report.lexical_success)
       << '\n';
  }
  if (report.semantic_k) {
    os << "  semantic success@" << *report.semantic_k << ": "
       << percent(*report.semantic_success) << '\n';
  }
  if (report.candidate_count) {
    os << "  merged recall (" << *report.candidate_count
       << "): " << percent(*report.candidate_recall) << '\n';
  }
  return os.str();
}

void write_submission(const std::vector<QueryResult>& results, const std::filesystem::path& path) {
  if (results.empty()) throw DataError("no results to submit");
  for (const auto& r : results) {
    if (r.ranking.empty()) throw DataError("query '" + r.query_id + "' has no predictions");
  }
  std::ostringstream os;
  os << "post_id\tpreds\n";
  for (const auto& r : results) {
    os << r.query_id << "\t[";
    const std::size_t n = std::min(kSubmissionIds, r.ranking.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i) os << ", ";
      os << '\'' << r.ranking[i].doc_id << '\'';
    }
    os << "]\n";
  }
  write_text_file(path, os.str());
}

std::string format_search_results(const std::vector<QueryResult>& results) {
  std::ostringstream os;
  os << "query_id\trank\tdoc_id\tscore\n";
  char buf[40];
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.ranking.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r.ranking[i].score);
      os << r.query_id << '\t' << i + 1 << '\t' << r.ranking[i].doc_id << '\t' << buf << '\n';
    }
  }
  return os.str();
}

void write_search_results(const std::vector<QueryResult>& results,
                          const std::filesystem::path& path) {
  write_text_file(path, format_search_results(results));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  finish(out, path);
}

}  // namespace sciret
