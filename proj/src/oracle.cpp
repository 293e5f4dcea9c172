#include "sjlt/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "sjlt/errors.hpp"
#include "sjlt/numeric.hpp"
#include "sjlt/parallel.hpp"
#include "sjlt/random.hpp"
#include "sjlt/transform.hpp"

namespace sjlt::oracle {

namespace {

using boost::multiprecision::cpp_int;

void require_unit(std::span<const double> x, double tol, const char *who) {
  CompensatedSum norm;
  for (double v : x) {
    norm += v * v;
  }
  if (!(std::fabs(norm.value() - 1.0) <= tol)) {
    throw DomainError(std::string(who) + ": x must be a unit vector (|‖x‖² - 1| <= " +
                      std::to_string(tol) + ")");
  }
}

void require_rate(double p, const char *who) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(who) + ": p must lie in (0, 1)");
  }
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (out > cap / std::max<std::uint64_t>(base, 1)) {
      return cap + 1;
    }
    out *= base;
  }
  return out;
}

// Moments E[W^j], j = 0..q, of W = (sum_i x_i r_i)^2 - sum_i x_i^2 over the
// support `mask`, averaged over all sign patterns on that support.
std::vector<double> support_moments(std::span<const double> x, unsigned mask, int q) {
  std::vector<int> support;
  double diag = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask & (1u << i)) {
      support.push_back(static_cast<int>(i));
      diag += x[i] * x[i];
    }
  }
  const unsigned patterns = 1u << support.size();
  std::vector<CompensatedSum> acc(q + 1);
  for (unsigned signs = 0; signs < patterns; ++signs) {
    double sum = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const double v = x[support[k]];
      sum += (signs & (1u << k)) ? v : -v;
    }
    const double w = sum * sum - diag;
    double power   = 1.0;
    for (int j = 0; j <= q; ++j) {
      acc[j] += power;
      power *= w;
    }
  }
  std::vector<double> out(q + 1);
  for (int j = 0; j <= q; ++j) {
    out[j] = acc[j].value() / patterns;
  }
  return out;
}

// Moments of an independent sum from the moments of its two parts.
std::vector<double> convolve_moments(const std::vector<double> &a, const std::vector<double> &b) {
  const int q = static_cast<int>(a.size()) - 1;
  std::vector<double> out(q + 1);
  for (int j = 0; j <= q; ++j) {
    CompensatedSum sum;
    double binom = 1.0;
    for (int l = 0; l <= j; ++l) {
      sum += binom * a[l] * b[j - l];
      binom = binom * (j - l) / (l + 1);
    }
    out[j] = sum.value();
  }
  return out;
}

std::vector<unsigned> subsets_of_size(int m, int s) {
  std::vector<unsigned> out;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) == s) {
      out.push_back(mask);
    }
  }
  return out;
}

const std::vector<cpp_int> &factorials() {
  static const std::vector<cpp_int> table = [] {
    std::vector<cpp_int> f(2 * kMaxMultinomialOrder + 1);
    f[0] = 1;
    for (std::size_t i = 1; i < f.size(); ++i) {
      f[i] = f[i - 1] * static_cast<unsigned>(i);
    }
    return f;
  }();
  return table;
}

cpp_int multinomial(int total, const std::vector<int> &parts, int scale) {
  const auto &f = factorials();
  cpp_int denom = 1;
  for (int d : parts) {
    denom *= f[scale * d];
  }
  return f[scale * total] / denom;
}

}  // namespace

std::vector<double> exact_moments_Z(std::span<const double> x, double p, int q_max,
                                    std::uint64_t budget) {
  if (x.empty()) {
    throw DomainError("exact_moment_Z: x must be nonempty");
  }
  if (x.size() > kMaxMomentDimension) {
    throw BudgetError("exact_moment_Z: enumeration budget exceeded (length(x) = " +
                      std::to_string(x.size()) + " > 14)");
  }
  require_unit(x, 1e-12, "exact_moment_Z");
  require_rate(p, "exact_moment_Z");
  if (q_max < 0) {
    throw DomainError("exact_moment_Z: moment order must be nonnegative");
  }
  const auto n = static_cast<unsigned>(x.size());
  if (checked_pow(3, n, budget) > budget) {
    throw BudgetError("exact_moment_Z: enumeration budget exceeded (3^" + std::to_string(n) +
                      " terms > " + std::to_string(budget) + ")");
  }

  std::vector<CompensatedSum> acc(q_max + 1);
  for (unsigned eta = 0; eta < (1u << n); ++eta) {
    const int k         = std::popcount(eta);
    const double weight = std::pow(p, k) * std::pow(1.0 - p, static_cast<int>(n) - k);
    const auto moments  = support_moments(x, eta, q_max);
    for (int j = 0; j <= q_max; ++j) {
      acc[j] += weight * moments[j];
    }
  }
  std::vector<double> out(q_max + 1);
  for (int j = 0; j <= q_max; ++j) {
    out[j] = acc[j].value();
  }
  return out;
}

double exact_moment_Z(const MomentSpec &spec, std::uint64_t budget) {
  if (spec.q < 0) {
    throw DomainError("exact_moment_Z: q must be nonnegative");
  }
  return exact_moments_Z(spec.x, spec.p, spec.q, budget)[spec.q];
}

double moment_bound_rhs(double p, int q) {
  if (q < 2) {
    throw DomainError("moment_bound_rhs: q must be at least 2");
  }
  require_rate(p, "moment_bound_rhs");
  double sum = 0.0;
  for (int r = 2; r <= q; ++r) {
    sum += std::pow(p, r) * std::pow(static_cast<double>(r), q);
  }
  return std::ldexp(sum, q);
}

MultinomialReport check_multinomial_inequality(int q_max, bool list_compositions) {
  if (q_max < 1) {
    throw DomainError("check_multinomial_inequality: q_max must be at least 1");
  }
  if (q_max > kMaxMultinomialOrder) {
    throw BudgetError("check_multinomial_inequality: q_max " + std::to_string(q_max) +
                      " exceeds the budget of 20");
  }
  MultinomialReport report;
  report.q_max = q_max;
  std::vector<int> parts;
  for (int q = 1; q <= q_max; ++q) {
    // Each subset of the q-1 gaps between units is one composition of q.
    for (std::uint32_t cuts = 0; cuts < (1u << (q - 1)); ++cuts) {
      parts.clear();
      int run = 1;
      for (int gap = 0; gap < q - 1; ++gap) {
        if (cuts & (1u << gap)) {
          parts.push_back(run);
          run = 1;
        } else {
          ++run;
        }
      }
      parts.push_back(run);

      const cpp_int lhs   = multinomial(q, parts, 2);
      const cpp_int inner = multinomial(q, parts, 1);
      const cpp_int rhs   = (cpp_int(1) << q) * inner * inner;
      ++report.compositions_checked;
      const bool holds = lhs <= rhs;
      if (!holds || list_compositions) {
        CompositionCheck c{q, parts, holds, lhs.str(), rhs.str()};
        if (!holds) {
          report.violations.push_back(c);
        }
        if (list_compositions) {
          report.compositions.push_back(std::move(c));
        }
      }
    }
  }
  const auto &f = factorials();
  for (int k = 0; k <= q_max; ++k) {
    const cpp_int central = f[2 * k] / (f[k] * f[k]);
    ++report.central_binomial_checked;
    if (central < (cpp_int(1) << k)) {
      report.central_binomial_violations.push_back(k);
    }
  }
  return report;
}

MajorizationResult check_majorization(const MajorizationSpec &spec, std::uint64_t budget) {
  const int n = spec.n, m = spec.m, s = spec.s, q = spec.q;
  if (n < 1 || n > 4 || m < 1 || m > 5) {
    throw DomainError("check_majorization: requires 1 <= n <= 4 and 1 <= m <= 5");
  }
  if (s < 1 || s > m) {
    throw DomainError("check_majorization: requires 1 <= s <= m");
  }
  if (q < 2 || q > 6 || q % 2 != 0) {
    throw DomainError("check_majorization: q must be even and in [2, 6]");
  }
  if (static_cast<int>(spec.x.size()) != n) {
    throw DimensionMismatch("check_majorization: x must have length n");
  }
  require_unit(spec.x, 1e-12, "check_majorization");

  const auto subsets = subsets_of_size(m, s);
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 1024;
  const std::uint64_t selections = checked_pow(subsets.size(), n, cap);
  const std::uint64_t work = selections > cap ? cap : selections * m * (1u << n);
  if (work > budget) {
    throw BudgetError("check_majorization: enumeration budget exceeded (" +
                      std::to_string(work) + " > " + std::to_string(budget) + " terms)");
  }

  // Conditional row moments for every possible set of columns hitting a row.
  std::vector<std::vector<double>> by_mask(1u << n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    by_mask[mask] = support_moments(spec.x, mask, q);
  }
  std::vector<double> identity(q + 1, 0.0);
  identity[0] = 1.0;

  // Left side: columns choose s-subsets of rows uniformly and independently.
  CompensatedSum lhs;
  std::vector<std::size_t> choice(n, 0);
  for (std::uint64_t combo = 0; combo < selections; ++combo) {
    auto total = identity;
    for (int row = 0; row < m; ++row) {
      unsigned mask = 0;
      for (int col = 0; col < n; ++col) {
        if (subsets[choice[col]] & (1u << row)) {
          mask |= 1u << col;
        }
      }
      total = convolve_moments(total, by_mask[mask]);
    }
    lhs += total[q];
    for (int col = 0; col < n; ++col) {
      if (++choice[col] < subsets.size()) {
        break;
      }
      choice[col] = 0;
    }
  }

  // Right side: every selector is an independent Bernoulli(s/m).
  const double rate = static_cast<double>(s) / m;
  std::vector<double> row(q + 1, 0.0);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k    = std::popcount(mask);
    const double w = std::pow(rate, k) * std::pow(1.0 - rate, n - k);
    for (int j = 0; j <= q; ++j) {
      row[j] += w * by_mask[mask][j];
    }
  }
  auto total = identity;
  for (int r = 0; r < m; ++r) {
    total = convolve_moments(total, row);
  }

  const double norm = std::pow(static_cast<double>(s), q);
  return {lhs.value() / static_cast<double>(selections) / norm, total[q] / norm};
}

PsiEnvelopeReport check_psi_envelope(double p, double K, std::size_t grid_points) {
  if (grid_points == 0) {
    throw DomainError("check_psi_envelope: grid_points must be positive");
  }
  PsiEnvelopeReport report;
  report.p           = p;
  report.K           = K;
  report.grid_points = grid_points;
  report.t_max       = concentration::mgf_envelope_t_max(p);
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= grid_points; ++j) {
    const double t   = report.t_max * static_cast<double>(j) / static_cast<double>(grid_points);
    const double lhs = concentration::psi(t, p);
    const double env = concentration::psi_envelope(t, K);
    const double gap = lhs - env;
    if (gap > report.max_violation) {
      report.max_violation = gap;
      report.t_at_max      = t;
    }
    if (gap > report.slack * std::max(1.0, env)) {
      ++report.violations;
    }
  }
  return report;
}

ChernoffGridReport check_chernoff_grid() {
  auto logspace = [](double lo, double hi, int count) {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    }
    return out;
  };
  ChernoffGridReport report;
  for (double V : logspace(0.1, 10.0, 5)) {
    for (double K : logspace(1.0, 100.0, 5)) {
      for (double u : logspace(0.01, 10.0, 4)) {
        const double r = concentration::chernoff_optimum_check({V, K}, u);
        report.points.push_back({V, K, u, r});
        report.max_residual = std::max(report.max_residual, r);
      }
    }
  }
  return report;
}

double poisson_upper_tail(double lambda, std::uint64_t k) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("poisson_upper_tail: lambda must be positive");
  }
  if (k == 0) {
    return 1.0;
  }
  const double kd = static_cast<double>(k);
  double term     = std::exp(-lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0));
  CompensatedSum sum;
  for (std::uint64_t j = k; j < k + 100000; ++j) {
    sum += term;
    term *= lambda / static_cast<double>(j + 1);
    if (static_cast<double>(j + 1) > lambda && term < 1e-20 * sum.value()) {
      break;
    }
  }
  return std::min(1.0, sum.value());
}

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0 || successes > trials) {
    throw DomainError("clopper_pearson: requires 0 <= successes <= trials, trials > 0");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("clopper_pearson: confidence must lie in (0, 1)");
  }
  const double alpha = 1.0 - confidence;
  const auto k       = static_cast<double>(successes);
  const auto n       = static_cast<double>(trials);
  Interval out;
  out.low  = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  out.high = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return out;
}

TrialReport estimate_failure_prob(std::uint64_t n, std::uint32_t m, std::uint32_t s,
                                  std::span<const double> x, double eps, std::uint64_t trials,
                                  std::uint64_t seed, unsigned threads) {
  if (trials == 0) {
    throw DomainError("estimate_failure_prob: trials must be at least 1");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw DomainError("estimate_failure_prob: eps must be positive");
  }
  if (x.size() != n) {
    throw DimensionMismatch("estimate_failure_prob: expected x of length n=" + std::to_string(n));
  }
  require_unit(x, 1e-9, "estimate_failure_prob");
  // Surface parameter errors before spawning workers.
  (void)SparseJLMatrix::build(1, m, s, seed);

  std::atomic<std::uint64_t> failures{0};
  parallel_for_chunks(trials, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> y(m);
    std::uint64_t local = 0;
    for (std::size_t t = begin; t < end; ++t) {
      const auto a = SparseJLMatrix::build(n, m, s, stream_key(seed, t));
      a.apply_into(x, y);
      CompensatedSum norm;
      for (double v : y) {
        norm += v * v;
      }
      if (std::fabs(norm.value() - 1.0) > eps) {
        ++local;
      }
    }
    failures += local;
  });

  TrialReport report;
  report.n        = n;
  report.m        = m;
  report.s        = s;
  report.eps      = eps;
  report.trials   = trials;
  report.failures = failures.load();
  report.p_hat    = static_cast<double>(report.failures) / static_cast<double>(trials);
  const auto ci   = clopper_pearson(report.failures, trials, report.confidence);
  report.ci_low   = std::min(ci.low, report.p_hat);
  report.ci_high  = std::max(ci.high, report.p_hat);
  report.seed     = seed;
  return report;
}

std::vector<double> random_unit_vector(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  if (n == 0) {
    throw DomainError("random_unit_vector: n must be positive");
  }
  Xoshiro256 rng(stream_key(seed, index));
  std::vector<double> v(n);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto &e : v) {
      // Box-Muller, cosine half only.
      const double u1 = 1.0 - rng.uniform();
      const double u2 = rng.uniform();
      e = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      norm += e * e;
    }
  } while (norm == 0.0);
  const double inv = 1.0 / std::sqrt(norm);
  for (auto &e : v) {
    e *= inv;
  }
  return v;
}

MomentSweepReport moment_bound_sweep(int n_min, int n_max, int q_max, std::span<const double> ps,
                                     int vectors_per_n, std::uint64_t seed) {
  if (q_max < 2) {
    throw DomainError("moment_bound_sweep: q_max must be at least 2");
  }
  MomentSweepReport report;
  std::uint64_t stream = 0;
  for (int n = n_min; n <= n_max; ++n) {
    for (int v = 0; v < vectors_per_n; ++v) {
      const auto x = random_unit_vector(static_cast<std::size_t>(n), seed, stream++);
      for (double p : ps) {
        const auto moments = exact_moments_Z(x, p, q_max);
        for (int q = 2; q <= q_max; ++q) {
          const double bound = moment_bound_rhs(p, q);
          ++report.cases;
          report.worst_ratio = std::max(report.worst_ratio, moments[q] / bound);
          if (moments[q] > bound * (1.0 + 1e-12)) {
            ++report.violations;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace sjlt::oracle
