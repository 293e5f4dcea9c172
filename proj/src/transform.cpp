#include "sjlt/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "sjlt/errors.hpp"
#include "sjlt/parallel.hpp"
#include "sjlt/random.hpp"

namespace sjlt {

namespace {

// Above this m the shuffle scratch is a hash map instead of a dense array.
constexpr std::uint32_t kDenseScratchLimit = 1u << 22;

// Virtual identity permutation of [0, m) that supports swaps and O(touched)
// reset. Dense and sparse variants behave identically.
class DenseScratch {
 public:
  explicit DenseScratch(std::uint32_t m) : perm_(m) { std::iota(perm_.begin(), perm_.end(), 0u); }

  std::uint32_t get(std::uint32_t i) const { return perm_[i]; }
  void set(std::uint32_t i, std::uint32_t v) { perm_[i] = v; }
  void restore(std::span<const std::uint32_t> touched) {
    for (auto i : touched) {
      perm_[i] = i;
    }
  }

 private:
  std::vector<std::uint32_t> perm_;
};

class SparseScratch {
 public:
  explicit SparseScratch(std::uint32_t) {}

  std::uint32_t get(std::uint32_t i) const {
    auto it = map_.find(i);
    return it == map_.end() ? i : it->second;
  }
  void set(std::uint32_t i, std::uint32_t v) { map_[i] = v; }
  void restore(std::span<const std::uint32_t>) { map_.clear(); }

 private:
  std::unordered_map<std::uint32_t, std::uint32_t> map_;
};

template <typename Scratch>
void draw_columns(std::uint64_t begin, std::uint64_t end, std::uint32_t m, std::uint32_t s,
                  std::uint64_t seed, std::uint32_t *rows, std::int8_t *signs) {
  Scratch scratch(m);
  std::vector<std::uint32_t> touched;
  touched.reserve(2 * static_cast<std::size_t>(s));
  std::vector<std::pair<std::uint32_t, std::int8_t>> entries(s);

  for (std::uint64_t col = begin; col < end; ++col) {
    Xoshiro256 rng(stream_key(seed, col));
    touched.clear();
    for (std::uint32_t j = 0; j < s; ++j) {
      const auto k  = static_cast<std::uint32_t>(j + rng.below(m - j));
      const auto vj = scratch.get(j);
      const auto vk = scratch.get(k);
      scratch.set(j, vk);
      scratch.set(k, vj);
      touched.push_back(j);
      touched.push_back(k);
      entries[j].first = vk;
    }
    std::uint64_t bits = 0;
    for (std::uint32_t j = 0; j < s; ++j) {
      if (j % 64 == 0) {
        bits = rng();
      }
      entries[j].second = (bits & 1u) ? std::int8_t{1} : std::int8_t{-1};
      bits >>= 1;
    }
    scratch.restore(touched);

    std::sort(entries.begin(), entries.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (std::uint32_t j = 0; j < s; ++j) {
      rows[col * s + j]  = entries[j].first;
      signs[col * s + j] = entries[j].second;
    }
  }
}

void check_shape(std::uint64_t n, std::uint32_t m, std::uint32_t s) {
  if (n == 0 || m == 0 || s == 0) {
    throw DomainError("n, m and s must be positive (got n=" + std::to_string(n) +
                      ", m=" + std::to_string(m) + ", s=" + std::to_string(s) + ")");
  }
  if (s > m) {
    throw DomainError("invalid sparsity: s=" + std::to_string(s) + " exceeds m=" +
                      std::to_string(m));
  }
  if (n > (std::uint64_t{1} << 40) / s) {
    throw DomainError("matrix too large: n * s exceeds 2^40 entries");
  }
}

}  // namespace

SparseJLMatrix::SparseJLMatrix(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                               std::uint64_t seed)
    : n_(n), m_(m), s_(s), seed_(seed), scale_(1.0 / std::sqrt(static_cast<double>(s))) {}

SparseJLMatrix SparseJLMatrix::build(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                                     std::uint64_t seed, unsigned threads) {
  check_shape(n, m, s);
  SparseJLMatrix a(n, m, s, seed);
  a.rows_.resize(n * s);
  a.signs_.resize(n * s);
  // Tiny matrices are not worth a thread.
  if (n * s < 65536) {
    threads = 1;
  }
  parallel_for_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
    if (m <= kDenseScratchLimit) {
      draw_columns<DenseScratch>(begin, end, m, s, seed, a.rows_.data(), a.signs_.data());
    } else {
      draw_columns<SparseScratch>(begin, end, m, s, seed, a.rows_.data(), a.signs_.data());
    }
  });
  return a;
}

SparseJLMatrix SparseJLMatrix::from_parts(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                                          std::uint64_t seed, std::vector<std::uint32_t> rows,
                                          std::vector<std::int8_t> signs) {
  try {
    check_shape(n, m, s);
  } catch (const DomainError &e) {
    throw FormatError(FormatErrorKind::header, e.what());
  }
  if (rows.size() != n * s || signs.size() != n * s) {
    throw FormatError(FormatErrorKind::entry_count,
                      "entry count: expected n * s = " + std::to_string(n * s) + " entries");
  }
  std::vector<std::uint32_t> sorted(s);
  for (std::uint64_t col = 0; col < n; ++col) {
    for (std::uint32_t j = 0; j < s; ++j) {
      const auto r = rows[col * s + j];
      const auto g = signs[col * s + j];
      if (r >= m) {
        throw FormatError(FormatErrorKind::row_range,
                          "row range: column " + std::to_string(col) + " has row index " +
                              std::to_string(r) + " >= m");
      }
      if (g != 1 && g != -1) {
        throw FormatError(FormatErrorKind::sign_domain,
                          "sign domain: column " + std::to_string(col) + " has sign " +
                              std::to_string(g));
      }
      sorted[j] = r;
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw FormatError(FormatErrorKind::duplicate_row,
                        "duplicate row index in column " + std::to_string(col));
    }
  }
  SparseJLMatrix a(n, m, s, seed);
  a.rows_  = std::move(rows);
  a.signs_ = std::move(signs);
  return a;
}

double SparseJLMatrix::column_norm_squared(std::uint64_t i) const {
  std::uint64_t sum = 0;
  for (auto g : column_signs(i)) {
    sum += static_cast<std::uint64_t>(g * g);
  }
  return static_cast<double>(sum) / static_cast<double>(s_);
}

void SparseJLMatrix::apply_into(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_) {
    throw DimensionMismatch("dimension mismatch: expected vector of length n=" +
                            std::to_string(n_) + ", got " + std::to_string(x.size()));
  }
  if (y.size() != m_) {
    throw DimensionMismatch("dimension mismatch: output must have length m=" +
                            std::to_string(m_));
  }
  std::fill(y.begin(), y.end(), 0.0);
  const std::uint32_t *row  = rows_.data();
  const std::int8_t *sign   = signs_.data();
  for (std::uint64_t i = 0; i < n_; ++i) {
    const double xi = x[i];
    if (xi != 0.0) {
      for (std::uint32_t j = 0; j < s_; ++j) {
        y[row[j]] += sign[j] > 0 ? xi : -xi;
      }
    }
    row += s_;
    sign += s_;
  }
  for (auto &v : y) {
    v *= scale_;
  }
}

std::vector<double> SparseJLMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(m_);
  apply_into(x, y);
  return y;
}

std::vector<std::vector<double>> SparseJLMatrix::apply_batch(
    const std::vector<std::vector<double>> &xs, unsigned threads) const {
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k].size() != n_) {
      throw DimensionMismatch("dimension mismatch at batch index " + std::to_string(k) +
                              ": expected length n=" + std::to_string(n_) + ", got " +
                              std::to_string(xs[k].size()));
    }
  }
  std::vector<std::vector<double>> ys(xs.size());
  parallel_for_chunks(xs.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      ys[k] = apply(xs[k]);
    }
  });
  return ys;
}

}  // namespace sjlt
