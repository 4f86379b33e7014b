// In-process stand-in for the model server, speaking the same JSON wire
// protocol. Embeddings are hash-bucket vectors and rerank scores are token
// overlap, so results can be compared against the local test providers.
#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "sciret/embedding.hpp"
#include "sciret/rerank.hpp"

class MockModelServer {
 public:
  using json = nlohmann::json;

  MockModelServer(sciret::Tokenizer tokenizer, std::size_t dim)
      : tokenizer_(std::move(tokenizer)), dim_(dim) {
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      ++health_calls;
      json j{{"status", "ok"}, {"query_instruction", ""}};
      if (report_embed_fp) j["embed_model_fingerprint"] = embed_fp;
      if (report_rerank_fp) j["rerank_model_fingerprint"] = "mock-rerank-1";
      res.set_content(j.dump(), "application/json");
    });
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++embed_calls;
      const json body = json::parse(req.body);
      json vectors = json::array();
      for (const auto& t : body.at("texts")) {
        const auto v = sciret::hash_embed(t.get<std::string>(), dim_, tokenizer_);
        std::vector<double> out(v.values.begin(), v.values.end());
        if (scale_vectors != 1.0) {
          for (auto& x : out) x *= scale_vectors;
        }
        vectors.push_back(out);
      }
      if (drop_one_vector && !vectors.empty()) vectors.erase(vectors.end() - 1);
      {
        std::lock_guard lock(mutex_);
        last_role = body.at("role").get<std::string>();
        batch_sizes.push_back(body.at("texts").size());
      }
      json out{{"vectors", vectors}, {"dim", dim_}, {"model_fingerprint", embed_fp_in_responses}};
      res.set_content(out.dump(), "application/json");
    });
    server_.Post("/rerank", [this](const httplib::Request& req, httplib::Response& res) {
      ++rerank_calls;
      if (fail_rerank) {
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      }
      const json body = json::parse(req.body);
      const std::string query = body.at("query").get<std::string>();
      json scores = json::array();
      for (const auto& c : body.at("candidates")) {
        sciret::Document d{"", c.at("text").get<std::string>(), ""};
        // doc_text already joined title and abstract; feed it back as a title.
        scores.push_back(sciret::overlap_stub_score(query, d, tokenizer_));
      }
      if (extra_score) scores.push_back(0.0);
      res.set_content(json{{"scores", scores}, {"model_fingerprint", "mock-rerank-1"}}.dump(),
                      "application/json");
    });
    server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      ++generate_calls;
      const json body = json::parse(req.body);
      {
        std::lock_guard lock(mutex_);
        last_template = body.at("template_name").get<std::string>();
      }
      res.set_content(json{{"text", "generated:" + body.at("template_name").get<std::string>()}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockModelServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> health_calls{0}, embed_calls{0}, rerank_calls{0}, generate_calls{0};
  std::string embed_fp = "mock-embed-1";
  std::string embed_fp_in_responses = "mock-embed-1";
  bool report_embed_fp = true;
  bool report_rerank_fp = true;
  bool drop_one_vector = false;
  bool fail_rerank = false;
  bool extra_score = false;
  double scale_vectors = 1.0;
  std::string last_role;
  std::string last_template;
  std::vector<std::size_t> batch_sizes;

 private:
  sciret::Tokenizer tokenizer_;
  std::size_t dim_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mutex_;
};
