#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sjlt/transform.hpp"

namespace sjlt::io {

inline constexpr std::uint32_t kFormatVersion = 1;

// Binary matrix layout, all integers little-endian:
//
//   u32 format_version   (= 1)
//   u64 n
//   u32 m
//   u32 s
//   u64 seed
//   n column records, each:
//     u32 entry_count    (must equal s)
//     entry_count x { u32 row_index, u8 sign (0x00 = -1, 0x01 = +1) }
//
// Nothing may follow the last column record.

std::vector<std::uint8_t> serialize(const SparseJLMatrix &a);
SparseJLMatrix deserialize(std::span<const std::uint8_t> bytes);

// JSON interchange form:
//   {"format_version": 1, "n": .., "m": .., "s": .., "seed": ..,
//    "columns": [[[row, sign], ...], ...]}    with sign in {-1, 1}.
std::string to_json(const SparseJLMatrix &a);
SparseJLMatrix from_json(std::string_view text);

enum class MatrixFormat { binary, json };

void save_matrix(const std::filesystem::path &path, const SparseJLMatrix &a,
                 MatrixFormat format = MatrixFormat::binary);
/// Detects the JSON variant by a leading '{'.
SparseJLMatrix load_matrix(const std::filesystem::path &path);

/// One vector per line, comma-separated decimals. Blank lines are skipped.
std::vector<std::vector<double>> read_vectors(std::istream &in);
/// Shortest round-trip decimal form, comma-separated, one vector per line.
void write_vectors(std::ostream &out, const std::vector<std::vector<double>> &vs);

std::string format_double(double v);

}  // namespace sjlt::io
