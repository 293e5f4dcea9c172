#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sjlt/concentration.hpp"

namespace sjlt::planner {

/// Target distortion, failure probability and sparsity fraction p = s/m.
struct PlanRequest {
  double eps   = 0.0;
  double delta = 0.0;
  double p     = 0.0;
  /// Envelope scale; the dimension bound uses h(K eps / (2p)).
  double K = concentration::kDefaultEnvelopeScale;

  /// Request with p derived from a column sparsity s and dimension m.
  static PlanRequest from_sparsity(double eps, double delta, std::uint64_t s, std::uint64_t m);

  /// Throws DomainError / ConstraintViolation when the request is invalid.
  void validate() const;
};

struct PlanResult {
  std::uint64_t m_min = 0;
  double h_value            = 0.0;  ///< h(K eps / (2p))
  double gaussian_reference = 0.0;  ///< 4 log(2/delta) / eps^2
  double slack              = 0.0;  ///< p log(1/(2p)) - eps
  std::uint64_t s_implied   = 0;    ///< round(p m_min)
  /// Set when p * m_min < 1, i.e. the rounded sparsity is not meaningful.
  bool s_below_one = false;
  /// Unrounded right-hand side of the dimension bound.
  double m_bound = 0.0;
};

/// Smallest embedding dimension certified for (eps, delta, p).
PlanResult min_dimension(const PlanRequest &req);

/// Largest eps for which the dimension certificate applies: p log(1/(2p)).
double max_certified_eps(double p);

struct Tradeoff {
  std::uint64_t m = 0;
  std::uint64_t s = 0;
};

/// Dimension/sparsity tradeoff for an inflation factor B > 2. This is
/// asymptotic guidance: `s_constant` is not pinned down by any proof.
Tradeoff sparsity_tradeoff(double eps, double delta, double B, double s_constant = 1.0);

struct BoundsRow {
  std::string source;
  std::string analysis;
  double formula_value = 0.0;  ///< constant * formula, rounded up
  double constant      = 1.0;
  bool valid           = true;
  std::string note;
};

struct BoundsOptions {
  double B = 4.0;
  /// Per-source overrides of the unspecified leading constants, keyed by
  /// BoundsRow::source.
  std::map<std::string, double> constants;
  double K = concentration::kDefaultEnvelopeScale;
};

/// Row labels, in table order.
inline constexpr const char *kThisWorkSource = "this_work";
inline constexpr const char *kCohen2018ExplicitSource = "cohen2018simple_explicit";

/// Dimension bounds from the sparse JL literature, evaluated at
/// (eps, delta, p). Rows whose preconditions fail are flagged invalid.
std::vector<BoundsRow> bounds_table(double eps, double delta, double p,
                                    const BoundsOptions &opts = {});

/// CSV with header `source,formula_value,constant,valid`.
std::string bounds_table_csv(const std::vector<BoundsRow> &rows);

}  // namespace sjlt::planner
