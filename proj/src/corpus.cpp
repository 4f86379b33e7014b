#include "sciret/corpus.hpp"

#include <unicode/utf8.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"

namespace sciret {
namespace {

using json = nlohmann::json;

std::string line_context(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

// Column name -> index for a TSV header row.
struct TsvHeader {
  std::vector<std::string> names;

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    return std::nullopt;
  }
};

// Optional string field: missing or null -> empty.
std::string string_field(const json& rec, const char* key, const std::string& ctx) {
  const auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw DataError(ctx + ": field '" + key + "' is not a string");
  }
  return it->get<std::string>();
}

// Ids may be numeric in some exports (post ids); normalize to text.
std::optional<std::string> id_field(const json& rec, const char* key, const std::string& ctx) {
  const auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw DataError(ctx + ": field '" + key + "' is not a string or integer");
}

void check_single_gold(const std::string& gold, const std::string& ctx) {
  if (gold.empty()) throw DataError(ctx + ": empty gold id");
  for (char c : gold) {
    if (c == ',' || c == ';' || c == '[' || c == ' ' || c == '\t') {
      throw DataError(ctx + ": multiple gold ids are not supported ('" + gold + "')");
    }
  }
}

template <typename RowFn>
void for_each_line(const std::filesystem::path& path, RowFn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const std::string ctx = line_context(path, line_no);
    require_utf8(line, ctx);
    fn(line, line_no, ctx);
  }
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const auto length = static_cast<std::int32_t>(bytes.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

void require_utf8(std::string_view bytes, std::string_view context) {
  if (!is_valid_utf8(bytes)) {
    throw DataError(std::string(context) + ": invalid UTF-8");
  }
}

FileFormat parse_format(std::string_view name) {
  if (name == "jsonl") return FileFormat::jsonl;
  if (name == "tsv") return FileFormat::tsv;
  throw UsageError("unknown format '" + std::string(name) + "' (expected jsonl or tsv)");
}

FileFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return FileFormat::jsonl;
  if (ext == ".tsv" || ext == ".txt") return FileFormat::tsv;
  throw UsageError("cannot infer format of " + path.string() + "; pass --format");
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  if (documents_.empty()) throw DataError("empty corpus");
  Fingerprinter fp;
  id_index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& d = documents_[i];
    if (d.doc_id.empty()) {
      throw DataError("document at position " + std::to_string(i) + " has an empty id");
    }
    if (d.title.empty() && d.abstract.empty()) {
      throw DataError("document '" + d.doc_id + "' has neither title nor abstract");
    }
    if (!id_index_.emplace(d.doc_id, i).second) {
      throw DataError("duplicate document id '" + d.doc_id + "'");
    }
    fp.add(d.doc_id).add(d.title).add(d.abstract);
  }
  fingerprint_ = fp.value();
}

std::optional<std::size_t> Corpus::position(std::string_view doc_id) const {
  const auto it = id_index_.find(std::string(doc_id));
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

const Document& Corpus::by_id(std::string_view doc_id) const {
  const auto pos = position(doc_id);
  if (!pos) throw DataError("unknown document id '" + std::string(doc_id) + "'");
  return documents_[*pos];
}

Corpus load_corpus(const std::filesystem::path& path, FileFormat format) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen;

  auto add = [&](Document d, const std::string& ctx) {
    if (d.doc_id.empty()) throw DataError(ctx + ": missing cord_uid");
    if (d.title.empty() && d.abstract.empty()) {
      throw DataError(ctx + ": document '" + d.doc_id + "' has neither title nor abstract");
    }
    if (!seen.emplace(d.doc_id, docs.size()).second) {
      throw DataError(ctx + ": duplicate document id '" + d.doc_id + "'");
    }
    docs.push_back(std::move(d));
  };

  if (format == FileFormat::jsonl) {
    for_each_line(path, [&](const std::string& line, std::size_t, const std::string& ctx) {
      if (line.find_first_not_of(" \t") == std::string::npos) return;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::parse_error& e) {
        throw DataError(ctx + ": malformed record: " + e.what());
      }
      if (!rec.is_object()) throw DataError(ctx + ": malformed record: not an object");
      Document d;
      d.doc_id = id_field(rec, "cord_uid", ctx).value_or("");
      d.title = string_field(rec, "title", ctx);
      d.abstract = string_field(rec, "abstract", ctx);
      add(std::move(d), ctx);
    });
  } else {
    TsvHeader header;
    std::optional<std::size_t> id_col, title_col, abstract_col;
    for_each_line(path, [&](const std::string& line, std::size_t line_no, const std::string& ctx) {
      if (line_no == 1) {
        header.names = split_tabs(line);
        id_col = header.find("cord_uid");
        title_col = header.find("title");
        abstract_col = header.find("abstract");
        if (!id_col || !title_col) {
          throw DataError(ctx + ": TSV header must contain cord_uid and title");
        }
        return;
      }
      if (line.empty()) return;
      const auto cols = split_tabs(line);
      if (cols.size() != header.names.size()) {
        throw DataError(ctx + ": malformed record: expected " +
                        std::to_string(header.names.size()) + " columns, got " +
                        std::to_string(cols.size()));
      }
      Document d;
      d.doc_id = cols[*id_col];
      d.title = cols[*title_col];
      if (abstract_col) d.abstract = cols[*abstract_col];
      add(std::move(d), ctx);
    });
  }

  if (docs.empty()) throw DataError("empty corpus: " + path.string());
  return Corpus(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path) {
  return load_corpus(path, format_from_path(path));
}

QuerySet load_queries(const std::filesystem::path& path, FileFormat format) {
  QuerySet set;
  std::unordered_map<std::string, std::size_t> seen;
  std::optional<bool> gold_seen;

  auto add = [&](Query q, const std::string& ctx) {
    if (q.query_id.empty()) throw DataError(ctx + ": missing post_id");
    if (!seen.emplace(q.query_id, set.queries.size()).second) {
      throw DataError(ctx + ": duplicate query id '" + q.query_id + "'");
    }
    const bool has = q.gold_doc_id.has_value();
    if (has) check_single_gold(*q.gold_doc_id, ctx);
    if (gold_seen && *gold_seen != has) {
      throw DataError(ctx + ": gold ids must be present for all queries or for none");
    }
    gold_seen = has;
    set.queries.push_back(std::move(q));
  };

  if (format == FileFormat::jsonl) {
    for_each_line(path, [&](const std::string& line, std::size_t, const std::string& ctx) {
      if (line.find_first_not_of(" \t") == std::string::npos) return;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::parse_error& e) {
        throw DataError(ctx + ": malformed record: " + e.what());
      }
      if (!rec.is_object()) throw DataError(ctx + ": malformed record: not an object");
      Query q;
      q.query_id = id_field(rec, "post_id", ctx).value_or("");
      q.text = string_field(rec, "tweet_text", ctx);
      q.gold_doc_id = id_field(rec, "cord_uid", ctx);
      add(std::move(q), ctx);
    });
  } else {
    TsvHeader header;
    std::optional<std::size_t> id_col, text_col, gold_col;
    for_each_line(path, [&](const std::string& line, std::size_t line_no, const std::string& ctx) {
      if (line_no == 1) {
        header.names = split_tabs(line);
        id_col = header.find("post_id");
        text_col = header.find("tweet_text");
        gold_col = header.find("cord_uid");
        if (!id_col || !text_col) {
          throw DataError(ctx + ": TSV header must contain post_id and tweet_text");
        }
        return;
      }
      if (line.empty()) return;
      const auto cols = split_tabs(line);
      if (cols.size() != header.names.size()) {
        throw DataError(ctx + ": malformed record: expected " +
                        std::to_string(header.names.size()) + " columns, got " +
                        std::to_string(cols.size()));
      }
      Query q;
      q.query_id = cols[*id_col];
      q.text = cols[*text_col];
      if (gold_col) q.gold_doc_id = cols[*gold_col];
      add(std::move(q), ctx);
    });
  }

  set.has_gold = gold_seen.value_or(false);
  return set;
}

QuerySet load_queries(const std::filesystem::path& path) {
  return load_queries(path, format_from_path(path));
}

void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& d : corpus.documents()) {
    json rec = {{"cord_uid", d.doc_id}, {"title", d.title}, {"abstract", d.abstract}};
    out << rec.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::string doc_text(const Document& d) {
  std::string text;
  text.reserve(d.title.size() + 1 + d.abstract.size());
  text += d.title;
  text += '\n';
  text += d.abstract;
  return text;
}

}  // namespace sciret
