#include "sciret/http_client.hpp"

#include <cstdlib>

#include "httplib.h"
#include "sciret/errors.hpp"

namespace sciret {
namespace {

using json = nlohmann::json;

json parse_body(const std::string& what, const httplib::Result& res) {
  if (!res) {
    throw ProviderError(what + ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    std::string detail = res->body.substr(0, 200);
    throw ProviderError(what + ": HTTP " + std::to_string(res->status) +
                        (detail.empty() ? "" : " (" + detail + ")"));
  }
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ProviderError(what + ": response is not JSON: " + e.what());
  }
}

}  // namespace

std::string endpoint_from_env() {
  const char* v = std::getenv("SCIRET_MODEL_SERVER");
  return v ? std::string(v) : std::string();
}

ServiceClient::ServiceClient(std::string endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  if (endpoint_.empty()) {
    throw UsageError("no model-server endpoint (pass --endpoint or set SCIRET_MODEL_SERVER)");
  }
  const auto scheme = endpoint_.find("://");
  if (scheme == std::string::npos) {
    throw UsageError("endpoint must look like http://host:port, got '" + endpoint_ + "'");
  }
  const auto slash = endpoint_.find('/', scheme + 3);
  base_ = endpoint_.substr(0, slash);
  if (slash != std::string::npos) {
    prefix_ = endpoint_.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
}

json ServiceClient::post(std::string_view path, const json& body) const {
  httplib::Client cli(base_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  const std::string full = prefix_ + std::string(path);
  auto res = cli.Post(full, body.dump(), "application/json");
  return parse_body("POST " + endpoint_ + std::string(path), res);
}

json ServiceClient::get(std::string_view path) const {
  httplib::Client cli(base_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  const std::string full = prefix_ + std::string(path);
  auto res = cli.Get(full);
  return parse_body("GET " + endpoint_ + std::string(path), res);
}

}  // namespace sciret
