#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

// Little-endian primitives for the on-disk index and embedding formats.

namespace sciret::binio {

void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f32(std::ostream& out, float v);
void write_f64(std::ostream& out, double v);
void write_str(std::ostream& out, const std::string& s);

// Readers throw DataError on truncation.
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
float read_f32(std::istream& in);
double read_f64(std::istream& in);
std::string read_str(std::istream& in, std::uint64_t max_len = 1ULL << 30);

/// Bytes left in a seekable stream.
std::uint64_t remaining(std::istream& in);
/// Throws DataError unless `count` records of `record_size` bytes can still
/// follow. Guards allocations driven by on-disk counts.
void require_available(std::istream& in, std::uint64_t count, std::uint64_t record_size);

}  // namespace sciret::binio
