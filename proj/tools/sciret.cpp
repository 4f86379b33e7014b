// Command-line front end: index, search, evaluate, ablate, augment, submit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sciret/augment.hpp"
#include "sciret/corpus.hpp"
#include "sciret/errors.hpp"
#include "sciret/http_client.hpp"
#include "sciret/log.hpp"
#include "sciret/pipeline.hpp"
#include "sciret/report.hpp"
#include "sciret/run_config.hpp"

using nlohmann::json;
using namespace sciret;

namespace {

struct Inputs {
  std::string corpus;
  std::string queries;
  std::string format;
  std::string config;
  std::string preset;
};

// Flag overrides, applied on top of the preset and config file. Each maps to
// the RunConfig key of the same name.
struct Overrides {
  std::optional<std::string> fusion, tokenizer, hashtag_policy, preserved_symbols;
  std::optional<std::size_t> vocab_size, lex_k, sem_k, top_n, eval_depth, rrf_window;
  std::optional<double> k1, b, rrf_constant;
  std::optional<std::string> embedding_provider, embedding_endpoint, embeddings_path,
      query_embeddings_path;
  std::optional<std::size_t> embedding_dim, embedding_batch_size;
  std::optional<std::string> reranker, reranker_endpoint;
  std::optional<std::size_t> reranker_batch_size, reranker_concurrency;
  std::optional<std::string> query_augmentation, generator, generator_endpoint,
      generator_fixture, lexical_index_path, merges_path;
  bool hyde = false;
  bool additional_documents = false;
  bool raw = false;
  std::optional<unsigned> threads;

  json to_json() const {
    json j = json::object();
    auto put = [&j](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    put("fusion", fusion);
    put("tokenizer", tokenizer);
    put("hashtag_policy", hashtag_policy);
    put("preserved_symbols", preserved_symbols);
    put("vocab_size", vocab_size);
    put("lex_k", lex_k);
    put("sem_k", sem_k);
    put("top_n", top_n);
    put("eval_depth", eval_depth);
    put("rrf_window", rrf_window);
    put("k1", k1);
    put("b", b);
    put("rrf_constant", rrf_constant);
    put("embedding_provider", embedding_provider);
    put("embedding_endpoint", embedding_endpoint);
    put("embeddings_path", embeddings_path);
    put("query_embeddings_path", query_embeddings_path);
    put("embedding_dim", embedding_dim);
    put("embedding_batch_size", embedding_batch_size);
    put("reranker", reranker);
    put("reranker_endpoint", reranker_endpoint);
    put("reranker_batch_size", reranker_batch_size);
    put("reranker_concurrency", reranker_concurrency);
    put("query_augmentation", query_augmentation);
    put("generator", generator);
    put("generator_endpoint", generator_endpoint);
    put("generator_fixture", generator_fixture);
    put("lexical_index_path", lexical_index_path);
    put("merges_path", merges_path);
    put("threads", threads);
    if (hyde) j["hyde"] = true;
    if (additional_documents) j["additional_documents"] = true;
    if (raw) {
      j["lowercase"] = false;
      j["strip_punctuation"] = false;
      j["strip_urls"] = false;
      j["hashtag_policy"] = "keep";
    }
    return j;
  }
};

void add_inputs(CLI::App* cmd, Inputs& in, bool needs_queries) {
  cmd->add_option("--corpus", in.corpus, "Corpus file (.jsonl or .tsv)")->required();
  auto* q = cmd->add_option("--queries", in.queries, "Query file (.jsonl or .tsv)");
  if (needs_queries) q->required();
  cmd->add_option("--format", in.format, "Force input format: jsonl or tsv");
}

void add_config(CLI::App* cmd, Inputs& in, Overrides& o) {
  cmd->add_option("--config", in.config, "JSON run configuration");
  cmd->add_option("--preset", in.preset, "Starting point: default, baseline-bm25, preprocessed-bm25");
  cmd->add_option("--fusion", o.fusion, "rerank, rrf, lexical or semantic");
  cmd->add_option("--tokenizer", o.tokenizer, "bpe or whitespace");
  cmd->add_flag("--raw", o.raw, "Disable all text normalization");
  cmd->add_option("--hashtag-policy", o.hashtag_policy, "strip_marker, drop_token or keep");
  cmd->add_option("--preserved-symbols", o.preserved_symbols, "Punctuation kept by normalization");
  cmd->add_option("--vocab-size", o.vocab_size, "BPE vocabulary size");
  cmd->add_option("--k1", o.k1, "BM25 k1");
  cmd->add_option("--b", o.b, "BM25 b");
  cmd->add_option("--lex-k", o.lex_k, "Lexical candidates per query");
  cmd->add_option("--sem-k", o.sem_k, "Semantic candidates per query");
  cmd->add_option("--top-n", o.top_n, "Results kept after re-ranking");
  cmd->add_option("--eval-depth", o.eval_depth, "List length for single-branch runs");
  cmd->add_option("--rrf-constant", o.rrf_constant, "RRF rank constant");
  cmd->add_option("--rrf-window", o.rrf_window, "RRF per-list window");
  cmd->add_option("--provider", o.embedding_provider, "Embedding provider: service, file or hash");
  cmd->add_option("--endpoint", o.embedding_endpoint, "Embedding service URL");
  cmd->add_option("--dim", o.embedding_dim, "Embedding dimension");
  cmd->add_option("--embed-batch-size", o.embedding_batch_size, "Texts per /embed request");
  cmd->add_option("--embeddings", o.embeddings_path, "Precomputed document embeddings");
  cmd->add_option("--query-embeddings", o.query_embeddings_path, "Precomputed query embeddings");
  cmd->add_option("--reranker", o.reranker, "service or stub");
  cmd->add_option("--reranker-endpoint", o.reranker_endpoint, "Re-ranking service URL");
  cmd->add_option("--rerank-batch-size", o.reranker_batch_size, "Candidates per /rerank request");
  cmd->add_option("--rerank-concurrency", o.reranker_concurrency, "Concurrent /rerank requests");
  cmd->add_option("--query-augmentation", o.query_augmentation, "none, rewrite or expand");
  cmd->add_flag("--hyde", o.hyde, "Embed a generated hypothetical document instead of the query");
  cmd->add_flag("--ad", o.additional_documents, "Index generated summaries and posts too");
  cmd->add_option("--generator", o.generator, "service or canned");
  cmd->add_option("--generator-endpoint", o.generator_endpoint, "Generation service URL");
  cmd->add_option("--fixture", o.generator_fixture, "Canned generator outputs (JSONL)");
  cmd->add_option("--index", o.lexical_index_path, "Prebuilt lexical index");
  cmd->add_option("--merges", o.merges_path, "BPE merges file");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

RunConfig resolve_config(const Inputs& in, const Overrides& o) {
  RunConfig cfg;
  if (in.preset == "baseline-bm25") {
    cfg = RunConfig::baseline_bm25();
  } else if (in.preset == "preprocessed-bm25") {
    cfg = RunConfig::preprocessed_bm25();
  } else if (!in.preset.empty() && in.preset != "default") {
    throw UsageError("unknown preset '" + in.preset + "'");
  }
  if (!in.config.empty()) cfg = RunConfig::load(in.config, cfg);
  cfg = RunConfig::from_json(o.to_json(), cfg);
  cfg.validate();
  return cfg;
}

Corpus read_corpus(const Inputs& in) {
  Corpus c = in.format.empty() ? load_corpus(in.corpus)
                               : load_corpus(in.corpus, parse_format(in.format));
  std::cerr << "loaded " << c.size() << " documents from " << in.corpus << '\n';
  return c;
}

QuerySet read_queries(const Inputs& in) {
  QuerySet q = in.format.empty() ? load_queries(in.queries)
                                 : load_queries(in.queries, parse_format(in.format));
  std::cerr << "loaded " << q.queries.size() << " queries from " << in.queries
            << (q.has_gold ? " (with gold ids)" : "") << '\n';
  return q;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
    std::cerr << "wrote " << path << '\n';
  }
}

std::vector<AblationRow> load_grid(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open grid " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("grid " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_array() || j.empty()) throw UsageError("grid must be a non-empty JSON array");
  std::vector<AblationRow> rows;
  for (const auto& row : j) {
    if (!row.is_object() || !row.contains("label") || !row["label"].is_string()) {
      throw UsageError("grid rows need a string 'label'");
    }
    json overrides = row.value("config", json::object());
    RunConfig cfg = RunConfig::from_json(overrides, base);
    cfg.validate();
    rows.push_back({row["label"].get<std::string>(), std::move(cfg)});
  }
  return rows;
}

int run(int argc, char** argv) {
  CLI::App app{"Hybrid lexical and dense retrieval of scientific sources for social-media posts"};
  app.require_subcommand(1);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");
  app.add_flag("-v,--verbose", verbose, "Progress messages");

  Inputs in;
  Overrides o;
  std::string out_path, merges_out, report_path, submission_path, grid_path, mode;
  bool prompts_only = false;

  auto* index = app.add_subcommand("index", "Build a lexical or dense index");
  index->require_subcommand(1);
  auto* index_lexical = index->add_subcommand("lexical", "BM25 index and BPE merges");
  add_inputs(index_lexical, in, false);
  add_config(index_lexical, in, o);
  index_lexical->add_option("--out", out_path, "Index file")->required();
  index_lexical->add_option("--merges-out", merges_out, "Write the BPE merges here");
  auto* index_dense = index->add_subcommand("dense", "Document embeddings");
  add_inputs(index_dense, in, false);
  add_config(index_dense, in, o);
  index_dense->add_option("--out", out_path, "Embedding file")->required();

  auto* search = app.add_subcommand("search", "Rank documents for every query");
  add_inputs(search, in, true);
  add_config(search, in, o);
  search->add_option("--out", out_path, "Results TSV (default: stdout)");
  search->add_option("--report", report_path, "Evaluation report JSON when golds are present");

  auto* evaluate = app.add_subcommand("evaluate", "Rank and score against gold ids");
  add_inputs(evaluate, in, true);
  add_config(evaluate, in, o);
  evaluate->add_option("--report", report_path, "Evaluation report JSON");

  auto* ablate = app.add_subcommand("ablate", "Evaluate a grid of configurations");
  add_inputs(ablate, in, true);
  add_config(ablate, in, o);
  ablate->add_option("--grid", grid_path,
                     "JSON array of {label, config}; default: lexical, semantic, rrf, rerank");
  ablate->add_option("--report", report_path, "Reports JSON");

  auto* augment = app.add_subcommand("augment", "Run a generation template over queries or documents");
  add_inputs(augment, in, false);
  add_config(augment, in, o);
  augment->add_option("--mode", mode, "rewrite, expand, hyde or ad")
      ->required()
      ->check(CLI::IsMember({"rewrite", "expand", "hyde", "ad"}));
  augment->add_option("--out", out_path, "JSONL output (default: stdout)");
  augment->add_flag("--prompts-only", prompts_only,
                    "Emit filled prompts and their hashes without calling a generator");

  auto* submit = app.add_subcommand("submit", "Write a submission file");
  add_inputs(submit, in, true);
  add_config(submit, in, o);
  submit->add_option("--out", submission_path, "Submission TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }
  set_log_level(quiet ? LogLevel::quiet : verbose ? LogLevel::info : LogLevel::warning);

  if (*index_lexical) {
    RunConfig cfg = resolve_config(in, o);
    const Corpus corpus = read_corpus(in);
    const Tokenizer tokenizer = build_tokenizer(cfg, corpus);
    const auto idx = InvertedIndex::build(corpus, tokenizer, cfg.bm25, cfg.threads);
    idx.save(out_path);
    std::cerr << "indexed " << idx.num_docs() << " documents, " << idx.num_terms() << " terms -> "
              << out_path << '\n';
    if (tokenizer.is_bpe()) {
      if (merges_out.empty()) {
        log_warning("BPE merges not saved; pass --merges-out to reuse this index");
      } else {
        save_merges(*tokenizer.vocab(), merges_out);
        std::cerr << tokenizer.vocab()->merges().size() << " merges -> " << merges_out << '\n';
      }
    }
    return 0;
  }

  if (*index_dense) {
    RunConfig cfg = resolve_config(in, o);
    const Corpus corpus = read_corpus(in);
    cfg.fusion = FusionMode::semantic_only;
    if (cfg.embedding == EmbeddingMode::file && cfg.query_embeddings_path.empty()) {
      cfg.query_embeddings_path = cfg.embeddings_path;
    }
    Pipeline pipeline(cfg, corpus);
    pipeline.store()->save(out_path);
    std::cerr << "embedded " << pipeline.store()->num_docs() << " documents ("
              << pipeline.store()->num_rows() << " rows, dim " << pipeline.store()->dim()
              << ") -> " << out_path << '\n';
    return 0;
  }

  if (*search || *evaluate || *submit) {
    const RunConfig cfg = resolve_config(in, o);
    const Corpus corpus = read_corpus(in);
    const QuerySet queries = read_queries(in);
    if (*evaluate && !queries.has_gold) {
      throw DataError(in.queries + " has no gold document ids");
    }
    const auto output = run_pipeline(cfg, corpus, queries);
    if (*submit) {
      write_submission(output.results, submission_path);
      std::cerr << "wrote " << output.results.size() << " predictions to " << submission_path
                << '\n';
      return 0;
    }
    if (*search) {
      emit(out_path, format_search_results(output.results));
    }
    if (output.report) {
      std::cerr << format_report_detail(*output.report);
      if (*evaluate) std::cout << format_report_table({*output.report});
      if (!report_path.empty()) emit(report_path, report_to_json(*output.report).dump(2) + "\n");
    }
    return 0;
  }

  if (*ablate) {
    const RunConfig base = resolve_config(in, o);
    const Corpus corpus = read_corpus(in);
    const QuerySet queries = read_queries(in);
    const auto grid = grid_path.empty() ? default_ablation_grid(base) : load_grid(grid_path, base);
    const auto reports = run_ablation(grid, corpus, queries);
    std::cout << format_report_table(reports);
    if (!report_path.empty()) emit(report_path, reports_to_json(reports).dump(2) + "\n");
    return 0;
  }

  if (*augment) {
    const bool on_docs = mode == "ad";
    if (!on_docs && in.queries.empty()) throw UsageError("--mode " + mode + " needs --queries");
    const Corpus corpus = read_corpus(in);
    std::optional<QuerySet> queries;
    if (!on_docs) queries = read_queries(in);

    std::unique_ptr<TextGenerator> gen;
    if (!prompts_only) {
      RunConfig cfg = resolve_config(in, o);
      GenerationProviderConfig gc;
      gc.mode = cfg.generator;
      gc.endpoint = cfg.generator_endpoint.empty() ? endpoint_from_env() : cfg.generator_endpoint;
      gc.fixture_path = cfg.generator_fixture;
      gen = make_generator(gc);
    }

    std::string lines;
    auto record = [&](const std::string& id, PromptName name, const std::string& prompt,
                      const json& result) {
      json j{{"id", id}, {"template", to_string(name)}, {"input_hash", prompt_hash(name, prompt)}};
      if (prompts_only) {
        j["filled_prompt"] = prompt;
      } else {
        j["result"] = result;
      }
      lines += j.dump() + "\n";
    };

    if (on_docs) {
      for (const auto& d : corpus.documents()) {
        const std::string summary_prompt = document_prompt(PromptName::doc_summary, d);
        const std::string tweet_prompt = document_prompt(PromptName::doc_tweet, d);
        json summary, tweet;
        if (gen) {
          const auto aug = augment_corpus(*gen, d);
          summary = aug.summary;
          tweet = aug.synthetic_tweet;
        }
        record(d.doc_id + std::string(kSummaryIdSuffix), PromptName::doc_summary, summary_prompt,
               summary);
        record(d.doc_id + std::string(kTweetIdSuffix), PromptName::doc_tweet, tweet_prompt, tweet);
      }
    } else {
      const PromptName name = parse_prompt_name(mode);
      for (const auto& q : queries->queries) {
        const std::string prompt = query_prompt(name, q.text);
        json result;
        if (gen) {
          if (name == PromptName::rewrite) {
            result = rewrite_query(*gen, q.text);
          } else if (name == PromptName::expand) {
            result = expand_query(*gen, q.text);
          } else {
            const auto h = hyde_document(*gen, q.text);
            result = json{{"title", h.title}, {"abstract", h.abstract}};
          }
        }
        const std::string id =
            name == PromptName::hyde ? q.query_id + std::string(kHydeIdSuffix) : q.query_id;
        record(id, name, prompt, result);
      }
    }
    emit(out_path, lines);
    return 0;
  }
  return static_cast<int>(ExitCode::usage);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::data);
  }
}
