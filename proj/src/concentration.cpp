#include "sjlt/concentration.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sjlt/errors.hpp"
#include "sjlt/numeric.hpp"

namespace sjlt::concentration {

namespace {

TailBound clamp_probability(double log_value) {
  if (std::isnan(log_value)) {
    throw DomainError("tail bound evaluated to NaN");
  }
  if (log_value >= 0.0) {
    return {1.0, true};
  }
  return {std::exp(log_value), false};
}

void require_positive(double v, const char *what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

void require_sparsity(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("p must be positive");
  }
  if (p > kMaxSparsity) {
    throw DomainError("p must satisfy p <= 1/30");
  }
}

}  // namespace

void TailEnvelope::validate() const {
  if (!(V >= 0.0) || !std::isfinite(V)) {
    throw DomainError("envelope V must be nonnegative and finite");
  }
  require_positive(K, "envelope K");
}

double bennet_h_series(double u, int terms) {
  if (terms < 1) {
    throw DomainError("bennet_h_series: at least one term required");
  }
  // h(u) = 2 sum_{j>=0} (-1)^j u^j / ((j+1)(j+2)); Horner from the top.
  double acc = 0.0;
  for (int j = terms - 1; j >= 0; --j) {
    const double coeff = 2.0 / ((j + 1.0) * (j + 2.0));
    acc = coeff - u * acc;
  }
  return acc;
}

double bennet_h_closed(double u) {
  if (u == 0.0) {
    return 1.0;
  }
  // (1+u)L - u with L = log1p(u) equals (1+u)(e^{-L} - 1 + L), which has no
  // cancellation for small u.
  const double L = std::log1p(u);
  return (1.0 + u) * exp_remainder(-L, 2) / (0.5 * u * u);
}

double bennet_h(double u) {
  if (std::isnan(u) || u < 0.0) {
    throw DomainError("bennet_h: argument must be nonnegative");
  }
  if (std::isinf(u)) {
    return 0.0;
  }
  if (u < kBennetSeriesThreshold) {
    return bennet_h_series(u, 5);
  }
  return bennet_h_closed(u);
}

TailBound poisson_tail_bound(double lambda, double eps) {
  require_positive(lambda, "lambda");
  require_positive(eps, "eps");
  const double log_bound = -lambda + eps * (1.0 + std::log(lambda) - std::log(eps));
  return clamp_probability(log_bound);
}

double psi(double t, double p) {
  require_sparsity(p);
  if (!(t > 0.0) || !(t < 0.5 * std::log(1.0 / p))) {
    throw DomainError("psi: t must lie in (0, log(1/p)/2)");
  }
  const double base = exp_remainder(4.0 * t, 3);
  if (t < 0.5) {
    const double denom = 1.0 - 2.0 * std::numbers::e * p * t;
    return base + 8.0 * std::exp(3.0) * p * t * t * t / denom;
  }
  const double denom = 1.0 - p * std::exp(2.0 * t);
  return base + p * std::exp(6.0 * t) / denom;
}

double psi_envelope(double t, double K) {
  require_positive(K, "K");
  return exp_remainder(K * t, 3) / (0.5 * K * K);
}

double mgf_envelope_t_max(double p) {
  require_sparsity(p);
  return 0.5 * std::log(1.0 / (2.0 * p));
}

double mgf_envelope_bound(double t, double p, double K) {
  require_positive(K, "K");
  if (!(t > 0.0) || !(t <= mgf_envelope_t_max(p))) {
    throw DomainError("mgf_envelope_bound: t must lie in (0, log(1/(2p))/2]");
  }
  return 1.0 + 2.0 * p * p * exp_remainder(K * t, 2) / (K * K);
}

double sub_poisson_exponent(const TailEnvelope &env, double u) {
  env.validate();
  require_positive(u, "u");
  if (env.V == 0.0) {
    return -INFINITY;
  }
  return -(u * u / (2.0 * env.V)) * bennet_h(env.K * u / env.V);
}

TailBound sub_poisson_tail(const TailEnvelope &env, double u) {
  const double exponent = sub_poisson_exponent(env, u);
  if (std::isinf(exponent)) {
    return {0.0, false};
  }
  return clamp_probability(exponent);
}

double chernoff_objective(const TailEnvelope &env, double u, double t) {
  env.validate();
  return env.V * exp_remainder(env.K * t, 2) / (env.K * env.K) - t * u;
}

double chernoff_argmin(const TailEnvelope &env, double u) {
  env.validate();
  require_positive(u, "u");
  if (env.V == 0.0) {
    throw DomainError("chernoff_argmin: degenerate envelope V = 0");
  }
  return std::log1p(env.K * u / env.V) / env.K;
}

double chernoff_optimum_check(const TailEnvelope &env, double u) {
  const double t_star = chernoff_argmin(env, u);
  return std::fabs(chernoff_objective(env, u, t_star) - sub_poisson_exponent(env, u));
}

}  // namespace sjlt::concentration
