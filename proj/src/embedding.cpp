#include "sciret/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sciret/binary_io.hpp"
#include "sciret/errors.hpp"
#include "sciret/hashing.hpp"
#include "sciret/http_client.hpp"
#include "sciret/log.hpp"

namespace sciret {
namespace {

using json = nlohmann::json;

constexpr char kEmbMagic[8] = {'S', 'C', 'I', 'R', 'E', 'M', 'B', '\0'};
constexpr std::uint32_t kEmbVersion = 1;

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (float x : values) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

EmbeddingVector unit_vector(std::span<const double> raw) {
  EmbeddingVector v;
  v.values.assign(raw.size(), 0.0F);
  if (raw.empty()) return v;
  const double n = l2(raw);
  if (n == 0.0) {
    v.values[0] = 1.0F;
    return v;
  }
  for (std::size_t i = 0; i < raw.size(); ++i) v.values[i] = static_cast<float>(raw[i] / n);
  return v;
}

EmbeddingVector accept_provider_vector(std::span<const double> raw, std::size_t expected_dim,
                                       std::string_view context) {
  if (raw.size() != expected_dim) {
    throw ProviderError(std::string(context) + ": dimension mismatch (expected " +
                        std::to_string(expected_dim) + ", got " + std::to_string(raw.size()) +
                        ")");
  }
  for (double x : raw) {
    if (!std::isfinite(x)) throw ProviderError(std::string(context) + ": non-finite value");
  }
  const double n = l2(raw);
  const double deviation = std::abs(n - 1.0);
  if (deviation > kRenormalizeLimit) {
    std::ostringstream msg;
    msg << context << ": vector norm " << n << " is not unit (tolerance " << kRenormalizeLimit
        << ")";
    throw ProviderError(msg.str());
  }
  if (deviation > kUnitNormTolerance) {
    std::ostringstream msg;
    msg << context << ": renormalizing vector with norm " << n;
    log_warning(msg.str());
    return unit_vector(raw);
  }
  // Within tolerance the values pass through, so a stored vector reloads bit-identically.
  EmbeddingVector v;
  v.values.assign(raw.begin(), raw.end());
  return v;
}

std::string_view to_string(EmbedRole role) {
  return role == EmbedRole::query ? "query" : "document";
}

EmbeddingMode parse_embedding_mode(std::string_view name) {
  if (name == "service") return EmbeddingMode::service;
  if (name == "file") return EmbeddingMode::file;
  if (name == "hash" || name == "hash_test") return EmbeddingMode::hash_test;
  throw UsageError("unknown embedding provider '" + std::string(name) + "'");
}

std::string_view to_string(EmbeddingMode mode) {
  switch (mode) {
    case EmbeddingMode::service: return "service";
    case EmbeddingMode::file: return "file";
    case EmbeddingMode::hash_test: return "hash";
  }
  return "?";
}

void EmbeddingProviderConfig::validate() const {
  switch (mode) {
    case EmbeddingMode::service:
      if (endpoint.empty()) throw UsageError("service embedding provider needs an endpoint");
      if (!path.empty()) throw UsageError("service embedding provider takes no file path");
      break;
    case EmbeddingMode::file:
      if (path.empty()) throw UsageError("file embedding provider needs a path");
      if (!endpoint.empty()) throw UsageError("file embedding provider takes no endpoint");
      break;
    case EmbeddingMode::hash_test:
      if (!endpoint.empty() || !path.empty()) {
        throw UsageError("hash embedding provider takes neither endpoint nor path");
      }
      if (dim < 2) throw UsageError("hash embedding dim must be >= 2");
      break;
  }
  if (batch_size == 0) throw UsageError("embedding batch_size must be >= 1");
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dim, const Tokenizer& tokenizer) {
  std::vector<double> counts(dim, 0.0);
  for (const auto& tok : tokenizer.tokenize(text)) counts[fnv1a64(tok) % dim] += 1.0;
  return unit_vector(counts);
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dim, const BpeVocab& vocab,
                           const NormalizationConfig& cfg) {
  return hash_embed(text, dim, Tokenizer::bpe(cfg, vocab));
}

HashEmbedder::HashEmbedder(Tokenizer tokenizer, std::size_t dim)
    : tokenizer_(std::move(tokenizer)), dim_(dim) {
  if (dim_ < 2) throw UsageError("hash embedding dim must be >= 2");
}

std::vector<EmbeddingVector> HashEmbedder::embed(std::span<const EmbedItem> items, EmbedRole) {
  std::vector<EmbeddingVector> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(hash_embed(item.text, dim_, tokenizer_));
  return out;
}

std::string HashEmbedder::fingerprint() const {
  return "hash:" + std::to_string(dim_) + ":" + to_hex(tokenizer_.fingerprint());
}

ServiceEmbedder::ServiceEmbedder(std::string endpoint, std::size_t dim, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), dim_(dim), batch_size_(batch_size == 0 ? 1 : batch_size) {
  const json health = ServiceClient(endpoint_).get("/health");
  if (!health.is_object() || !health.contains("embed_model_fingerprint") ||
      !health["embed_model_fingerprint"].is_string()) {
    throw ProviderError("GET /health did not report embed_model_fingerprint");
  }
  model_fingerprint_ = health["embed_model_fingerprint"].get<std::string>();
}

std::string ServiceEmbedder::fingerprint() const { return "service:" + model_fingerprint_; }

std::vector<EmbeddingVector> ServiceEmbedder::embed(std::span<const EmbedItem> items,
                                                    EmbedRole role) {
  ServiceClient client(endpoint_);
  std::vector<EmbeddingVector> out;
  out.reserve(items.size());
  for (std::size_t start = 0; start < items.size(); start += batch_size_) {
    const std::size_t end = std::min(items.size(), start + batch_size_);
    json texts = json::array();
    for (std::size_t i = start; i < end; ++i) {
      if (items[i].text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw DataError("cannot embed empty text for '" + items[i].id + "'");
      }
      texts.push_back(items[i].text);
    }
    const json resp = client.post("/embed", json{{"texts", texts}, {"role", to_string(role)}});
    if (!resp.is_object() || !resp.contains("vectors") || !resp["vectors"].is_array()) {
      throw ProviderError("/embed response lacks 'vectors'");
    }
    const auto& vectors = resp["vectors"];
    if (vectors.size() != end - start) {
      throw ProviderError("/embed returned " + std::to_string(vectors.size()) +
                          " vectors for " + std::to_string(end - start) + " texts");
    }
    if (resp.contains("dim") && resp["dim"].is_number_unsigned() &&
        resp["dim"].get<std::size_t>() != dim_) {
      throw ProviderError("/embed dimension mismatch (expected " + std::to_string(dim_) +
                          ", got " + std::to_string(resp["dim"].get<std::size_t>()) + ")");
    }
    if (resp.contains("model_fingerprint") && resp["model_fingerprint"].is_string() &&
        resp["model_fingerprint"].get<std::string>() != model_fingerprint_) {
      throw ProviderError("/embed model fingerprint changed since /health (" +
                          model_fingerprint_ + " -> " +
                          resp["model_fingerprint"].get<std::string>() + ")");
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      std::vector<double> raw;
      try {
        raw = vectors[i].get<std::vector<double>>();
      } catch (const json::exception&) {
        throw ProviderError("/embed vector " + std::to_string(i) + " is not a number list");
      }
      out.push_back(accept_provider_vector(raw, dim_, "/embed '" + items[start + i].id + "'"));
    }
  }
  return out;
}

void write_embedding_file(const std::filesystem::path& path, const EmbeddingTable& table) {
  if (table.values.size() != table.ids.size() * table.dim) {
    throw DataError("embedding table shape mismatch");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kEmbMagic, sizeof(kEmbMagic));
  binio::write_u32(out, kEmbVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(table.dim));
  binio::write_u64(out, table.ids.size());
  binio::write_str(out, table.provider_fingerprint);
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    binio::write_str(out, table.ids[i]);
    for (float x : table.row(i)) binio::write_f32(out, x);
  }
  if (!out) throw DataError("write failed: " + path.string());
}

EmbeddingTable read_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[sizeof(kEmbMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kEmbMagic))) {
    throw DataError(path.string() + ": not an embedding file");
  }
  const auto version = binio::read_u32(in);
  if (version != kEmbVersion) {
    throw DataError(path.string() + ": unsupported embedding file version " +
                    std::to_string(version));
  }
  EmbeddingTable table;
  table.dim = binio::read_u32(in);
  const auto count = binio::read_u64(in);
  table.provider_fingerprint = binio::read_str(in);
  if (table.dim == 0) throw DataError(path.string() + ": zero dimension");
  binio::require_available(in, count, 8 + 4ULL * table.dim);
  table.ids.reserve(count);
  table.values.reserve(count * table.dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    table.ids.push_back(binio::read_str(in));
    for (std::size_t j = 0; j < table.dim; ++j) table.values.push_back(binio::read_f32(in));
  }
  return table;
}

FileEmbedder::FileEmbedder(const std::filesystem::path& path, std::size_t expected_dim)
    : path_(path), table_(read_embedding_file(path)) {
  if (expected_dim != 0 && table_.dim != expected_dim) {
    throw DataError(path.string() + ": dimension mismatch (expected " +
                    std::to_string(expected_dim) + ", file has " + std::to_string(table_.dim) +
                    ")");
  }
  for (std::size_t i = 0; i < table_.ids.size(); ++i) {
    if (!rows_.emplace(table_.ids[i], i).second) {
      throw DataError(path.string() + ": duplicate id '" + table_.ids[i] + "'");
    }
  }
}

std::vector<EmbeddingVector> FileEmbedder::embed(std::span<const EmbedItem> items, EmbedRole) {
  std::vector<EmbeddingVector> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    const auto it = rows_.find(item.id);
    if (it == rows_.end()) {
      throw DataError(path_.string() + ": no vector for id '" + item.id + "'");
    }
    const auto row = table_.row(it->second);
    const std::vector<double> raw(row.begin(), row.end());
    out.push_back(accept_provider_vector(raw, table_.dim, path_.string() + " '" + item.id + "'"));
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& cfg,
                                                           const Tokenizer& tokenizer) {
  cfg.validate();
  switch (cfg.mode) {
    case EmbeddingMode::service:
      return std::make_unique<ServiceEmbedder>(cfg.endpoint, cfg.dim, cfg.batch_size);
    case EmbeddingMode::file:
      return std::make_unique<FileEmbedder>(cfg.path, cfg.dim);
    case EmbeddingMode::hash_test:
      return std::make_unique<HashEmbedder>(tokenizer, cfg.dim);
  }
  throw UsageError("unknown embedding mode");
}

std::vector<EmbeddingVector> embed(EmbeddingProvider& provider,
                                   const std::vector<std::string>& texts, EmbedRole role) {
  if (texts.empty()) throw UsageError("embed: no texts");
  std::vector<EmbedItem> items;
  items.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) items.push_back({std::to_string(i), texts[i]});
  auto out = provider.embed(items, role);
  if (out.size() != texts.size()) throw ProviderError("provider returned wrong vector count");
  for (const auto& v : out) {
    if (v.dim() != provider.dim()) throw ProviderError("provider dimension mismatch");
  }
  return out;
}

}  // namespace sciret
