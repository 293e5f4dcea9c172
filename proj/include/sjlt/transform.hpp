#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sjlt {

/// Sparse m x n random projection with exactly s nonzeros per column, each
/// equal to +-1/sqrt(s). Stored column-major as row indices and signs; the
/// scale is implied by s. Immutable after construction.
class SparseJLMatrix {
 public:
  /// Draws the matrix for (n, m, s, seed). Column i uses its own stream
  /// Xoshiro256(stream_key(seed, i)): a partial Fisher-Yates shuffle of
  /// [0, m) picks s distinct rows, then one random bit per entry gives the
  /// sign (bits taken least-significant first from successive 64-bit
  /// outputs). Each column is stored sorted by row.
  static SparseJLMatrix build(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                              std::uint64_t seed, unsigned threads = 1);

  /// Assembles a matrix from raw column-major storage (n * s rows and signs)
  /// and checks every invariant. Throws FormatError on violation.
  static SparseJLMatrix from_parts(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                                   std::uint64_t seed, std::vector<std::uint32_t> rows,
                                   std::vector<std::int8_t> signs);

  std::uint64_t n() const noexcept { return n_; }
  std::uint32_t m() const noexcept { return m_; }
  std::uint32_t s() const noexcept { return s_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double scale() const noexcept { return scale_; }

  std::span<const std::uint32_t> column_rows(std::uint64_t i) const {
    return {rows_.data() + i * s_, s_};
  }
  std::span<const std::int8_t> column_signs(std::uint64_t i) const {
    return {signs_.data() + i * s_, s_};
  }

  /// Squared norm of column i in exact arithmetic: (sum of sign^2) / s.
  double column_norm_squared(std::uint64_t i) const;

  /// y = A x. Throws DimensionMismatch if x.size() != n.
  std::vector<double> apply(std::span<const double> x) const;
  void apply_into(std::span<const double> x, std::span<double> y) const;

  /// Element-wise apply, order preserved. All lengths are checked before any
  /// work starts; a mismatch names the offending batch index.
  std::vector<std::vector<double>> apply_batch(const std::vector<std::vector<double>> &xs,
                                               unsigned threads = 1) const;

  friend bool operator==(const SparseJLMatrix &, const SparseJLMatrix &) = default;

 private:
  SparseJLMatrix(std::uint64_t n, std::uint32_t m, std::uint32_t s, std::uint64_t seed);

  std::uint64_t n_    = 0;
  std::uint32_t m_    = 0;
  std::uint32_t s_    = 0;
  std::uint64_t seed_ = 0;
  double scale_       = 0.0;
  std::vector<std::uint32_t> rows_;
  std::vector<std::int8_t> signs_;
};

inline SparseJLMatrix build_matrix(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                                   std::uint64_t seed) {
  return SparseJLMatrix::build(n, m, s, seed);
}

inline std::vector<double> apply(const SparseJLMatrix &a, std::span<const double> x) {
  return a.apply(x);
}

inline std::vector<std::vector<double>> apply_batch(const SparseJLMatrix &a,
                                                    const std::vector<std::vector<double>> &xs) {
  return a.apply_batch(xs);
}

}  // namespace sjlt
