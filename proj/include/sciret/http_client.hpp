#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "json.hpp"

namespace sciret {

/// Default model-server endpoint, read from SCIRET_MODEL_SERVER.
std::string endpoint_from_env();

/// JSON-over-HTTP client for the model server. Every failure (connection,
/// non-2xx status, unparseable body) surfaces as ProviderError.
class ServiceClient {
 public:
  /// `endpoint` is "http://host:port" with an optional path prefix.
  explicit ServiceClient(std::string endpoint,
                         std::chrono::seconds timeout = std::chrono::seconds(300));

  nlohmann::json post(std::string_view path, const nlohmann::json& body) const;
  nlohmann::json get(std::string_view path) const;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  std::string base_;
  std::string prefix_;
  std::chrono::seconds timeout_;
};

}  // namespace sciret
