#pragma once

#include <stdexcept>
#include <string>

namespace sciret {

/// Process exit codes used by the CLI.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  data = 2,
  provider = 3,
};

/// Base error. Carries the exit code the CLI reports for it.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Bad flags, bad config keys, conflicting options.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

/// Malformed or inconsistent input data (corpus, queries, index files).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::data, what) {}
};

/// Embedding, re-ranking or generation backend misbehaved or was unreachable.
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what)
      : Error(ExitCode::provider, what) {}
};

/// Throws the subclass matching `code`.
[[noreturn]] inline void throw_error(ExitCode code, const std::string& what) {
  switch (code) {
    case ExitCode::usage:
      throw UsageError(what);
    case ExitCode::provider:
      throw ProviderError(what);
    default:
      throw DataError(what);
  }
}

}  // namespace sciret
