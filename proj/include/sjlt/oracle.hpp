#pragma once

// Exact small-instance oracles and Monte Carlo estimators for the sparse JL
// concentration argument.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sjlt/concentration.hpp"

namespace sjlt::oracle {

inline constexpr std::size_t kMaxMomentDimension = 14;
/// 4^14 configurations.
inline constexpr std::uint64_t kDefaultMomentBudget = std::uint64_t{1} << 28;
inline constexpr std::uint64_t kDefaultMajorizationBudget = 10'000'000;

/// Moment query for Z = sum_{i != j} x_i x_j eta_i eta_j r_i r_j with
/// eta_i ~ Bernoulli(p) and r_i Rademacher, all independent.
struct MomentSpec {
  std::vector<double> x;  ///< unit vector, length <= 14
  double p = 0.0;
  int q    = 2;
};

/// Exact E[Z^q] by enumerating every (eta, r) configuration. Signs outside
/// the support of eta are summed out exactly, so 3^n terms are visited.
double exact_moment_Z(const MomentSpec &spec, std::uint64_t budget = kDefaultMomentBudget);

/// E[Z^k] for k = 0..q_max in a single enumeration pass.
std::vector<double> exact_moments_Z(std::span<const double> x, double p, int q_max,
                                    std::uint64_t budget = kDefaultMomentBudget);

/// 2^q sum_{r=2}^{q} p^r r^q, the moment bound for E[Z^q].
double moment_bound_rhs(double p, int q);

struct CompositionCheck {
  int q = 0;
  std::vector<int> parts;
  bool holds = true;
  std::string lhs;  ///< multinomial(2q; 2d_1, ..., 2d_r), decimal
  std::string rhs;  ///< 2^q multinomial(q; d_1, ..., d_r)^2, decimal
};

struct MultinomialReport {
  int q_max = 0;
  std::uint64_t compositions_checked = 0;
  /// Every composition checked, when requested.
  std::vector<CompositionCheck> compositions;
  std::vector<CompositionCheck> violations;
  /// Central binomial coefficients binom(2k, k) >= 2^k checked for k <= q_max.
  int central_binomial_checked = 0;
  std::vector<int> central_binomial_violations;

  bool passed() const { return violations.empty() && central_binomial_violations.empty(); }
};

inline constexpr int kMaxMultinomialOrder = 20;

/// Exhaustive check of multinomial(2q; 2d) <= 2^q multinomial(q; d)^2 over
/// all compositions d of every q in [1, q_max], in exact integers.
MultinomialReport check_multinomial_inequality(int q_max, bool list_compositions = true);

/// Majorization instance: n columns, m rows, s nonzeros per column.
struct MajorizationSpec {
  int n = 2;
  int m = 2;
  int s = 1;
  int q = 2;
  std::vector<double> x;
};

struct MajorizationResult {
  double lhs = 0.0;  ///< E (x^T B x)^q, columns sampled without replacement
  double rhs = 0.0;  ///< same with independent Bernoulli(s/m) selectors
};

/// Exact evaluation of both sides. Column selections are enumerated
/// jointly; given the selection, rows are independent in their signs and the
/// q-th moment of the row sum is assembled from per-row moments.
MajorizationResult check_majorization(const MajorizationSpec &spec,
                                      std::uint64_t budget = kDefaultMajorizationBudget);

struct PsiEnvelopeReport {
  double p = 0.0;
  double K = 0.0;
  std::size_t grid_points = 0;
  double t_max = 0.0;
  /// max over the grid of psi(t,p) - envelope(t); <= 0 when the envelope holds.
  double max_violation = 0.0;
  double t_at_max      = 0.0;
  std::size_t violations = 0;
  double slack = 1e-12;

  bool passed() const { return violations == 0; }
};

/// Checks psi(t, p) <= (e^{Kt} - K^2t^2/2 - Kt - 1)/(K^2/2) on the grid
/// t_j = t_max * j / grid_points, j = 1..grid_points, t_max = log(1/(2p))/2.
/// A point violates when psi exceeds the envelope by more than
/// slack * max(1, envelope).
PsiEnvelopeReport check_psi_envelope(double p, double K = concentration::kDefaultEnvelopeScale,
                                     std::size_t grid_points = 10'000);

struct ChernoffPoint {
  double V = 0.0;
  double K = 0.0;
  double u = 0.0;
  double residual = 0.0;
};

struct ChernoffGridReport {
  std::vector<ChernoffPoint> points;
  double max_residual = 0.0;
  double tolerance    = 1e-12;

  bool passed() const { return max_residual <= tolerance; }
};

/// chernoff_optimum_check on the 5 x 5 x 4 log-spaced grid
/// V in [0.1, 10], K in [1, 100], u in [0.01, 10].
ChernoffGridReport check_chernoff_grid();

/// Exact P{Poiss(lambda) >= k} by direct summation of the upper tail.
double poisson_upper_tail(double lambda, std::uint64_t k);

struct Interval {
  double low  = 0.0;
  double high = 1.0;
};

/// Exact (Clopper-Pearson) binomial confidence interval.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99);

struct TrialReport {
  std::uint64_t n = 0;
  std::uint32_t m = 0;
  std::uint32_t s = 0;
  double eps = 0.0;
  std::uint64_t trials   = 0;
  std::uint64_t failures = 0;
  double p_hat   = 0.0;
  double ci_low  = 0.0;
  double ci_high = 1.0;
  double confidence  = 0.99;
  std::uint64_t seed = 0;

  friend bool operator==(const TrialReport &, const TrialReport &) = default;
};

/// Empirical P{ |‖Ax‖^2 - 1| > eps } over `trials` independent matrices.
/// Trial t uses the matrix seed stream_key(seed, t); the report does not
/// depend on the thread count.
TrialReport estimate_failure_prob(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                                  std::span<const double> x, double eps, std::uint64_t trials,
                                  std::uint64_t seed, unsigned threads = 0);

/// Unit vector in R^n with independent Gaussian directions drawn from
/// stream `index` of `seed`.
std::vector<double> random_unit_vector(std::size_t n, std::uint64_t seed, std::uint64_t index = 0);

/// Summary of the moment-bound sweep used by the `check` command.
struct MomentSweepReport {
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  double worst_ratio = 0.0;  ///< max exact / bound
};

MomentSweepReport moment_bound_sweep(int n_min, int n_max, int q_max, std::span<const double> ps,
                                     int vectors_per_n, std::uint64_t seed);

}  // namespace sjlt::oracle
