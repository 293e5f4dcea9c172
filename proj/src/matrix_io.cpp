#include "sjlt/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "sjlt/errors.hpp"

namespace sjlt::io {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 8 + 4 + 4 + 8;
constexpr std::size_t kEntryBytes  = 4 + 1;

template <typename T>
void put_le(std::vector<std::uint8_t> &out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char *what) {
    require(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  void require(std::size_t count, const char *what) const {
    if (bytes_.size() - pos_ < count) {
      throw FormatError(FormatErrorKind::truncated,
                        std::string("truncated stream while reading ") + what);
    }
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t json_uint(const nlohmann::json &j, const char *key) {
  if (!j.contains(key) || !j[key].is_number_unsigned()) {
    if (j.contains(key) && j[key].is_number_integer() && j[key].get<std::int64_t>() >= 0) {
      return j[key].get<std::uint64_t>();
    }
    throw FormatError(FormatErrorKind::header,
                      std::string("missing or non-integer field \"") + key + "\"");
  }
  return j[key].get<std::uint64_t>();
}

std::uint32_t narrow_u32(std::uint64_t v, const char *key) {
  if (v > 0xffffffffULL) {
    throw FormatError(FormatErrorKind::header, std::string("field ") + key + " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize(const SparseJLMatrix &a) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + a.n() * (4 + kEntryBytes * a.s()));
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, a.n());
  put_le<std::uint32_t>(out, a.m());
  put_le<std::uint32_t>(out, a.s());
  put_le<std::uint64_t>(out, a.seed());
  for (std::uint64_t i = 0; i < a.n(); ++i) {
    put_le<std::uint32_t>(out, a.s());
    const auto rows  = a.column_rows(i);
    const auto signs = a.column_signs(i);
    for (std::uint32_t j = 0; j < a.s(); ++j) {
      put_le<std::uint32_t>(out, rows[j]);
      out.push_back(signs[j] > 0 ? 0x01 : 0x00);
    }
  }
  return out;
}

SparseJLMatrix deserialize(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const auto version = in.get<std::uint32_t>("format_version");
  if (version != kFormatVersion) {
    throw FormatError(FormatErrorKind::version,
                      "version mismatch: expected format_version 1, got " +
                          std::to_string(version));
  }
  const auto n    = in.get<std::uint64_t>("n");
  const auto m    = in.get<std::uint32_t>("m");
  const auto s    = in.get<std::uint32_t>("s");
  const auto seed = in.get<std::uint64_t>("seed");
  if (n == 0 || m == 0 || s == 0 || s > m) {
    throw FormatError(FormatErrorKind::header, "header requires n, m, s > 0 and s <= m");
  }
  // Every column needs at least its count word.
  if (in.remaining() / 4 < n) {
    throw FormatError(FormatErrorKind::truncated, "truncated stream: too few column records");
  }

  std::vector<std::uint32_t> rows;
  std::vector<std::int8_t> signs;
  const auto expected = std::min<std::uint64_t>(n * s, in.remaining() / kEntryBytes);
  rows.reserve(expected);
  signs.reserve(expected);
  for (std::uint64_t col = 0; col < n; ++col) {
    const auto count = in.get<std::uint32_t>("entry_count");
    if (count != s) {
      throw FormatError(FormatErrorKind::entry_count,
                        "entry count: column " + std::to_string(col) + " has " +
                            std::to_string(count) + " entries, expected s=" + std::to_string(s));
    }
    for (std::uint32_t j = 0; j < s; ++j) {
      rows.push_back(in.get<std::uint32_t>("row_index"));
      const auto sign = in.get<std::uint8_t>("sign");
      if (sign > 1) {
        throw FormatError(FormatErrorKind::sign_domain,
                          "sign domain: column " + std::to_string(col) + " has sign byte " +
                              std::to_string(sign));
      }
      signs.push_back(sign == 1 ? std::int8_t{1} : std::int8_t{-1});
    }
  }
  if (in.remaining() != 0) {
    throw FormatError(FormatErrorKind::trailing_data,
                      std::to_string(in.remaining()) + " trailing bytes after last column");
  }
  return SparseJLMatrix::from_parts(n, m, s, seed, std::move(rows), std::move(signs));
}

std::string to_json(const SparseJLMatrix &a) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["n"]              = a.n();
  j["m"]              = a.m();
  j["s"]              = a.s();
  j["seed"]           = a.seed();
  auto &columns       = j["columns"] = nlohmann::json::array();
  for (std::uint64_t i = 0; i < a.n(); ++i) {
    auto col         = nlohmann::json::array();
    const auto rows  = a.column_rows(i);
    const auto signs = a.column_signs(i);
    for (std::uint32_t k = 0; k < a.s(); ++k) {
      col.push_back({rows[k], static_cast<int>(signs[k])});
    }
    columns.push_back(std::move(col));
  }
  return j.dump() + "\n";
}

SparseJLMatrix from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(FormatErrorKind::syntax, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw FormatError(FormatErrorKind::syntax, "matrix JSON must be an object");
  }
  const auto version = json_uint(j, "format_version");
  if (version != kFormatVersion) {
    throw FormatError(FormatErrorKind::version,
                      "version mismatch: expected format_version 1, got " +
                          std::to_string(version));
  }
  const auto n    = json_uint(j, "n");
  const auto m    = narrow_u32(json_uint(j, "m"), "m");
  const auto s    = narrow_u32(json_uint(j, "s"), "s");
  const auto seed = json_uint(j, "seed");
  if (!j.contains("columns") || !j["columns"].is_array()) {
    throw FormatError(FormatErrorKind::header, "missing \"columns\" array");
  }
  const auto &columns = j["columns"];
  if (columns.size() != n) {
    throw FormatError(FormatErrorKind::truncated,
                      "expected " + std::to_string(n) + " columns, found " +
                          std::to_string(columns.size()));
  }
  std::vector<std::uint32_t> rows;
  std::vector<std::int8_t> signs;
  for (std::size_t col = 0; col < columns.size(); ++col) {
    const auto &c = columns[col];
    if (!c.is_array() || c.size() != s) {
      throw FormatError(FormatErrorKind::entry_count,
                        "entry count: column " + std::to_string(col) + " does not have s=" +
                            std::to_string(s) + " entries");
    }
    for (const auto &entry : c) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() ||
          !entry[1].is_number_integer()) {
        throw FormatError(FormatErrorKind::syntax, "entries must be [row, sign] integer pairs");
      }
      const auto r = entry[0].get<std::int64_t>();
      const auto g = entry[1].get<std::int64_t>();
      if (r < 0 || r >= static_cast<std::int64_t>(m)) {
        throw FormatError(FormatErrorKind::row_range,
                          "row range: column " + std::to_string(col) + " has row " +
                              std::to_string(r));
      }
      if (g != 1 && g != -1) {
        throw FormatError(FormatErrorKind::sign_domain,
                          "sign domain: column " + std::to_string(col) + " has sign " +
                              std::to_string(g));
      }
      rows.push_back(static_cast<std::uint32_t>(r));
      signs.push_back(static_cast<std::int8_t>(g));
    }
  }
  return SparseJLMatrix::from_parts(n, m, s, seed, std::move(rows), std::move(signs));
}

void save_matrix(const std::filesystem::path &path, const SparseJLMatrix &a,
                 MatrixFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  if (format == MatrixFormat::json) {
    out << to_json(a);
  } else {
    const auto bytes = serialize(a);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

SparseJLMatrix load_matrix(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  std::size_t first = 0;
  while (first < bytes.size() && (bytes[first] == ' ' || bytes[first] == '\n' ||
                                  bytes[first] == '\r' || bytes[first] == '\t')) {
    ++first;
  }
  if (first < bytes.size() && bytes[first] == '{') {
    return from_json(std::string_view(reinterpret_cast<const char *>(bytes.data()), bytes.size()));
  }
  return deserialize(bytes);
}

std::vector<std::vector<double>> read_vectors(std::istream &in) {
  std::vector<std::vector<double>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    std::vector<double> v;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      auto field       = rest.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
      }
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
        field.remove_suffix(1);
      }
      if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
      }
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError(FormatErrorKind::syntax, "line " + std::to_string(lineno) +
                                                       ": cannot parse \"" +
                                                       std::string(field) + "\" as a number");
      }
      v.push_back(value);
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_vectors(std::ostream &out, const std::vector<std::vector<double>> &vs) {
  for (const auto &v : vs) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i != 0) {
        out << ',';
      }
      out << format_double(v[i]);
    }
    out << '\n';
  }
}

}  // namespace sjlt::io
