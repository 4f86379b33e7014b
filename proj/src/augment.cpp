#include "sciret/augment.hpp"

#include <fstream>

#include "json.hpp"
#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"
#include "sciret/http_client.hpp"

namespace sciret {

namespace detail {
extern const std::string_view kRewriteTemplate;
extern const std::string_view kExpandTemplate;
extern const std::string_view kHydeTemplate;
extern const std::string_view kDocSummaryTemplate;
extern const std::string_view kDocTweetTemplate;
}  // namespace detail

namespace {

using json = nlohmann::json;

constexpr std::string_view kSeparator = " || ";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Pulls the outermost {...} out of a generation and reads string fields.
json parse_json_object(std::string_view output, PromptName name) {
  const auto open = output.find('{');
  const auto close = output.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw ProviderError(std::string(to_string(name)) +
                        ": generator output has no JSON object: " + std::string(output));
  }
  json obj;
  try {
    obj = json::parse(output.substr(open, close - open + 1));
  } catch (const json::exception&) {
    obj = nullptr;
  }
  if (!obj.is_object()) {
    throw ProviderError(std::string(to_string(name)) +
                        ": unparseable generator output: " + std::string(output));
  }
  return obj;
}

std::string required_string(const json& obj, const char* key, PromptName name) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || trim(it->get<std::string>()).empty()) {
    throw ProviderError(std::string(to_string(name)) + ": generator output lacks a non-empty '" +
                        key + "' string");
  }
  return trim(it->get<std::string>());
}

}  // namespace

PromptName parse_prompt_name(std::string_view name) {
  if (name == "rewrite") return PromptName::rewrite;
  if (name == "expand") return PromptName::expand;
  if (name == "hyde") return PromptName::hyde;
  if (name == "doc_summary") return PromptName::doc_summary;
  if (name == "doc_tweet") return PromptName::doc_tweet;
  throw UsageError("unknown prompt template '" + std::string(name) + "'");
}

std::string_view to_string(PromptName name) {
  switch (name) {
    case PromptName::rewrite: return "rewrite";
    case PromptName::expand: return "expand";
    case PromptName::hyde: return "hyde";
    case PromptName::doc_summary: return "doc_summary";
    case PromptName::doc_tweet: return "doc_tweet";
  }
  return "?";
}

const PromptTemplate& prompt_template(PromptName name) {
  static const PromptTemplate templates[] = {
      {PromptName::rewrite, detail::kRewriteTemplate},
      {PromptName::expand, detail::kExpandTemplate},
      {PromptName::hyde, detail::kHydeTemplate},
      {PromptName::doc_summary, detail::kDocSummaryTemplate},
      {PromptName::doc_tweet, detail::kDocTweetTemplate},
  };
  return templates[static_cast<int>(name)];
}

std::string PromptTemplate::fill(const std::map<std::string, std::string>& slots) const {
  std::string out;
  out.reserve(body.size() + 256);
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      const auto close = body.find('}', i + 1);
      if (close != std::string_view::npos) {
        const std::string key(body.substr(i + 1, close - i - 1));
        const bool is_slot = !key.empty() && key.find_first_not_of(
                                                 "abcdefghijklmnopqrstuvwxyz_") == std::string::npos;
        if (is_slot) {
          const auto it = slots.find(key);
          if (it == slots.end()) {
            throw UsageError(std::string(to_string(name)) + " template: no value for {" + key +
                             "}");
          }
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += body[i++];
  }
  return out;
}

std::string_view format_instructions(PromptName name) {
  switch (name) {
    case PromptName::hyde:
      return R"(Return only a JSON object with the string fields "title" and "abstract".)";
    case PromptName::doc_summary:
      return R"(Return only a JSON object with the string field "summary".)";
    case PromptName::doc_tweet:
      return R"(Return only a JSON object with the string field "tweet".)";
    default:
      return {};
  }
}

std::string prompt_hash(PromptName name, std::string_view filled_prompt) {
  std::string key(to_string(name));
  key.push_back('\0');
  key.append(filled_prompt);
  return to_hex(fnv1a64(key));
}

CannedGenerator::CannedGenerator(const std::filesystem::path& fixture) : path_(fixture) {
  std::ifstream in(fixture, std::ios::binary);
  if (!in) throw DataError("cannot open generation fixture " + fixture.string());
  Fingerprinter fp;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = fixture.string() + ":" + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(ctx + ": malformed fixture record");
    }
    if (!rec.is_object() || !rec.contains("input_hash") || !rec.contains("text") ||
        !rec["input_hash"].is_string() || !rec["text"].is_string()) {
      throw DataError(ctx + ": fixture record needs string input_hash and text");
    }
    const auto hash = rec["input_hash"].get<std::string>();
    const auto text = rec["text"].get<std::string>();
    if (!outputs_.emplace(hash, text).second) {
      throw DataError(ctx + ": duplicate input_hash " + hash);
    }
    fp.add(hash).add(text);
  }
  content_hash_ = fp.value();
}

std::string CannedGenerator::generate(PromptName name, std::string_view filled_prompt) {
  const auto hash = prompt_hash(name, filled_prompt);
  const auto it = outputs_.find(hash);
  if (it == outputs_.end()) {
    throw ProviderError("no canned " + std::string(to_string(name)) + " output for input_hash " +
                        hash + " in " + path_.string());
  }
  return it->second;
}

std::string CannedGenerator::fingerprint() const { return "canned:" + to_hex(content_hash_); }

ServiceGenerator::ServiceGenerator(std::string endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.empty()) throw UsageError("service generator needs an endpoint");
}

std::string ServiceGenerator::generate(PromptName name, std::string_view filled_prompt) {
  const json resp = ServiceClient(endpoint_).post(
      "/generate", json{{"template_name", to_string(name)}, {"filled_prompt", filled_prompt}});
  if (!resp.is_object() || !resp.contains("text") || !resp["text"].is_string()) {
    throw ProviderError("/generate response lacks 'text'");
  }
  return resp["text"].get<std::string>();
}

std::string CachingGenerator::generate(PromptName name, std::string_view filled_prompt) {
  auto key = std::make_pair(name, prompt_hash(name, filled_prompt));
  {
    std::lock_guard lock(mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  std::string text = inner_->generate(name, filled_prompt);
  std::lock_guard lock(mutex_);
  return cache_.emplace(std::move(key), std::move(text)).first->second;
}

std::size_t CachingGenerator::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

GenerationMode parse_generation_mode(std::string_view name) {
  if (name == "service") return GenerationMode::service;
  if (name == "canned") return GenerationMode::canned;
  throw UsageError("unknown generator mode '" + std::string(name) + "'");
}

std::string_view to_string(GenerationMode mode) {
  return mode == GenerationMode::service ? "service" : "canned";
}

void GenerationProviderConfig::validate() const {
  if (mode == GenerationMode::service) {
    if (endpoint.empty()) throw UsageError("service generator needs an endpoint");
    if (!fixture_path.empty()) throw UsageError("service generator takes no fixture");
  } else {
    if (fixture_path.empty()) throw UsageError("canned generator needs a fixture path");
    if (!endpoint.empty()) throw UsageError("canned generator takes no endpoint");
  }
}

std::unique_ptr<TextGenerator> make_generator(const GenerationProviderConfig& cfg) {
  cfg.validate();
  std::unique_ptr<TextGenerator> inner;
  if (cfg.mode == GenerationMode::service) {
    inner = std::make_unique<ServiceGenerator>(cfg.endpoint);
  } else {
    inner = std::make_unique<CannedGenerator>(cfg.fixture_path);
  }
  return std::make_unique<CachingGenerator>(std::move(inner));
}

std::string rewrite_query(TextGenerator& gen, std::string_view tweet) {
  std::string out = trim(gen.generate(PromptName::rewrite, query_prompt(PromptName::rewrite, tweet)));
  if (out.empty()) throw ProviderError("rewrite: generator returned empty output");
  return out;
}

std::pair<std::string, std::string> parse_expansion(std::string_view output) {
  const auto sep = output.find(kSeparator);
  if (sep == std::string_view::npos) {
    throw ProviderError("expand: separator \" || \" missing in generator output: " +
                        std::string(output));
  }
  return {trim(output.substr(0, sep)), trim(output.substr(sep + kSeparator.size()))};
}

std::string expand_query(TextGenerator& gen, std::string_view tweet) {
  const auto [corrected, academic] =
      parse_expansion(gen.generate(PromptName::expand, query_prompt(PromptName::expand, tweet)));
  if (corrected.empty() && academic.empty()) {
    throw ProviderError("expand: generator returned empty output");
  }
  return corrected + " " + academic;
}

std::string query_prompt(PromptName name, std::string_view tweet) {
  std::map<std::string, std::string> slots{{"tweet", std::string(tweet)}};
  switch (name) {
    case PromptName::rewrite:
    case PromptName::expand:
      break;
    case PromptName::hyde:
      slots["format_instructions"] = std::string(format_instructions(name));
      break;
    default:
      throw UsageError(std::string(to_string(name)) + " is not a query prompt");
  }
  return prompt_template(name).fill(slots);
}

std::string document_prompt(PromptName name, const Document& doc) {
  if (name != PromptName::doc_summary && name != PromptName::doc_tweet) {
    throw UsageError(std::string(to_string(name)) + " is not a document prompt");
  }
  return prompt_template(name).fill({{"title", doc.title},
                                     {"page_content", doc.abstract},
                                     {"format_instructions", std::string(format_instructions(name))}});
}

std::string HydeDocument::text() const { return doc_text(Document{"", title, abstract}); }

HydeDocument hyde_document(TextGenerator& gen, std::string_view tweet) {
  const auto output = gen.generate(PromptName::hyde, query_prompt(PromptName::hyde, tweet));
  const json obj = parse_json_object(output, PromptName::hyde);
  return HydeDocument{required_string(obj, "title", PromptName::hyde),
                      required_string(obj, "abstract", PromptName::hyde)};
}

DocumentAugmentation augment_corpus(TextGenerator& gen, const Document& doc) {
  auto ask = [&](PromptName name, const char* key) {
    const auto output = gen.generate(name, document_prompt(name, doc));
    return required_string(parse_json_object(output, name), key, name);
  };
  DocumentAugmentation aug;
  aug.summary = ask(PromptName::doc_summary, "summary");
  aug.synthetic_tweet = ask(PromptName::doc_tweet, "tweet");
  return aug;
}

}  // namespace sciret
