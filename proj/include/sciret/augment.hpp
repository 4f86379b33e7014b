#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "sciret/corpus.hpp"

namespace sciret {

enum class PromptName { rewrite, expand, hyde, doc_summary, doc_tweet };
PromptName parse_prompt_name(std::string_view name);
std::string_view to_string(PromptName name);

/// A prompt body with `{slot}` markers.
struct PromptTemplate {
  PromptName name;
  std::string_view body;

  /// Substitutes every known `{slot}` in one pass; substituted text is never
  /// rescanned. Throws UsageError when a slot in the body has no value.
  std::string fill(const std::map<std::string, std::string>& slots) const;
};

const PromptTemplate& prompt_template(PromptName name);

/// Text substituted for `{format_instructions}`: the JSON shape the parser
/// below expects. Empty for templates without that slot.
std::string_view format_instructions(PromptName name);

/// Key for canned fixtures and the generation cache: FNV-1a of
/// template name, a NUL byte and the filled prompt, as 16 hex digits.
std::string prompt_hash(PromptName name, std::string_view filled_prompt);

/// Text generation backend.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(PromptName name, std::string_view filled_prompt) = 0;
  virtual std::string fingerprint() const = 0;
};

/// Replays a JSONL fixture of {input_hash, text} records.
class CannedGenerator final : public TextGenerator {
 public:
  explicit CannedGenerator(const std::filesystem::path& fixture);

  std::string generate(PromptName name, std::string_view filled_prompt) override;
  std::string fingerprint() const override;

 private:
  std::filesystem::path path_;
  std::unordered_map<std::string, std::string> outputs_;
  std::uint64_t content_hash_ = 0;
};

/// POST /generate {template_name, filled_prompt} -> {text}.
class ServiceGenerator final : public TextGenerator {
 public:
  explicit ServiceGenerator(std::string endpoint);

  std::string generate(PromptName name, std::string_view filled_prompt) override;
  std::string fingerprint() const override { return "service:" + endpoint_; }

 private:
  std::string endpoint_;
};

/// Memoizes another generator by (template, prompt hash). Thread-safe.
class CachingGenerator final : public TextGenerator {
 public:
  explicit CachingGenerator(std::unique_ptr<TextGenerator> inner) : inner_(std::move(inner)) {}

  std::string generate(PromptName name, std::string_view filled_prompt) override;
  std::string fingerprint() const override { return inner_->fingerprint(); }
  std::size_t cache_size() const;

 private:
  std::unique_ptr<TextGenerator> inner_;
  mutable std::mutex mutex_;
  std::map<std::pair<PromptName, std::string>, std::string> cache_;
};

enum class GenerationMode { service, canned };
GenerationMode parse_generation_mode(std::string_view name);
std::string_view to_string(GenerationMode mode);

struct GenerationProviderConfig {
  GenerationMode mode = GenerationMode::canned;
  std::string endpoint;
  std::filesystem::path fixture_path;

  void validate() const;
};

/// Filled prompt for a query-side template (rewrite, expand, hyde).
std::string query_prompt(PromptName name, std::string_view tweet);
/// Filled prompt for a document-side template (doc_summary, doc_tweet).
std::string document_prompt(PromptName name, const Document& doc);

/// Returns a caching generator for `cfg`.
std::unique_ptr<TextGenerator> make_generator(const GenerationProviderConfig& cfg);

/// Rewritten tweet, whitespace-trimmed. Empty output is an error; the raw
/// tweet is never substituted.
std::string rewrite_query(TextGenerator& gen, std::string_view tweet);

/// Splits "<corrected> || <academic>" on the literal separator.
/// Throws ProviderError carrying the raw output when it is absent.
std::pair<std::string, std::string> parse_expansion(std::string_view output);

/// Corrected tweet + " " + academic version.
std::string expand_query(TextGenerator& gen, std::string_view tweet);

struct HydeDocument {
  std::string title;
  std::string abstract;

  /// Same representation as doc_text.
  std::string text() const;
};

HydeDocument hyde_document(TextGenerator& gen, std::string_view tweet);

struct DocumentAugmentation {
  std::string summary;
  std::string synthetic_tweet;
};

/// Summary and synthetic post for one document.
DocumentAugmentation augment_corpus(TextGenerator& gen, const Document& doc);

/// Id suffixes used to look augmentation vectors up in precomputed files.
inline constexpr std::string_view kHydeIdSuffix = "#hyde";
inline constexpr std::string_view kSummaryIdSuffix = "#summary";
inline constexpr std::string_view kTweetIdSuffix = "#tweet";

}  // namespace sciret
