#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace sciret {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

/// 64-bit FNV-1a. Used for fingerprints and hash-bucket embeddings, never
/// for anything security-relevant.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

/// Incremental hasher. Each field is length-prefixed so that ("ab","c") and
/// ("a","bc") hash differently.
class Fingerprinter {
 public:
  Fingerprinter& add(std::string_view s) {
    add_u64(s.size());
    h_ = fnv1a64(s, h_);
    return *this;
  }

  Fingerprinter& add_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= static_cast<unsigned char>(v >> (8 * i));
      h_ *= kFnvPrime;
    }
    return *this;
  }

  Fingerprinter& add_double(double v);

  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = kFnvOffset;
};

inline Fingerprinter& Fingerprinter::add_double(double v) {
  return add_u64(std::bit_cast<std::uint64_t>(v));
}

std::string to_hex(std::uint64_t v);

}  // namespace sciret
