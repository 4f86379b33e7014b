#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sciret {

/// One scientific paper. Only title and abstract take part in retrieval.
struct Document {
  std::string doc_id;
  std::string title;
  std::string abstract;

  bool operator==(const Document&) const = default;
};

/// A social-media post whose cited paper we are looking for.
struct Query {
  std::string query_id;
  std::string text;
  std::optional<std::string> gold_doc_id;

  bool operator==(const Query&) const = default;
};

enum class FileFormat { jsonl, tsv };

/// Picks a format from the file extension (.jsonl/.json -> jsonl, .tsv -> tsv).
FileFormat format_from_path(const std::filesystem::path& path);
FileFormat parse_format(std::string_view name);

/// Immutable, ordered document collection with an id -> position index.
class Corpus {
 public:
  /// Throws DataError on duplicate ids, empty input or an invalid document.
  explicit Corpus(std::vector<Document> documents);

  std::size_t size() const { return documents_.size(); }
  const std::vector<Document>& documents() const { return documents_; }
  const Document& at(std::size_t pos) const { return documents_.at(pos); }

  std::optional<std::size_t> position(std::string_view doc_id) const;
  const Document& by_id(std::string_view doc_id) const;
  bool contains(std::string_view doc_id) const { return position(doc_id).has_value(); }

  /// Content hash over ids, titles and abstracts in order.
  std::uint64_t fingerprint() const { return fingerprint_; }

  bool operator==(const Corpus& other) const { return documents_ == other.documents_; }

 private:
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> id_index_;
  std::uint64_t fingerprint_ = 0;
};

struct QuerySet {
  std::vector<Query> queries;
  /// True when every query carries a gold id. Mixed sets are rejected on load.
  bool has_gold = false;
};

Corpus load_corpus(const std::filesystem::path& path, FileFormat format);
Corpus load_corpus(const std::filesystem::path& path);

QuerySet load_queries(const std::filesystem::path& path, FileFormat format);
QuerySet load_queries(const std::filesystem::path& path);

/// Writes {cord_uid, title, abstract} records, one per line.
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

/// Title, one newline, abstract. Nothing else.
std::string doc_text(const Document& d);

/// Throws DataError naming `context` if `bytes` is not well-formed UTF-8.
void require_utf8(std::string_view bytes, std::string_view context);
bool is_valid_utf8(std::string_view bytes);

}  // namespace sciret
