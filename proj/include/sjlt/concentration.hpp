#pragma once

// Bennet function, Poisson tails and the sub-Poisson MGF envelope used to
// certify sparse JL embeddings. Everything here is a pure function.

namespace sjlt::concentration {

/// Envelope scale used throughout the sparse JL tail argument.
inline constexpr double kDefaultEnvelopeScale = 50.0;

/// Largest sparsity fraction for which the psi envelope is established.
inline constexpr double kMaxSparsity = 1.0 / 30.0;

/// Below this argument bennet_h switches to its Taylor series.
inline constexpr double kBennetSeriesThreshold = 1e-4;

/// A bound clamped to [0, 1]. `vacuous` is set when the unclamped value
/// reached 1, i.e. the bound carries no information.
struct TailBound {
  double value   = 1.0;
  bool   vacuous = true;
};

/// MGF envelope log E e^{tX} <= V (e^{Kt} - Kt - 1) / K^2.
struct TailEnvelope {
  double V = 0.0;
  double K = kDefaultEnvelopeScale;

  /// Throws DomainError unless V >= 0 and K > 0 (both finite).
  void validate() const;
};

/// h(u) = ((1+u) log(1+u) - u) / (u^2/2), with h(0) = 1.
double bennet_h(double u);

/// Truncated Taylor expansion 1 - u/3 + u^2/6 - u^3/10 + ... of h.
double bennet_h_series(double u, int terms = 5);

/// Closed-form h using log1p; loses accuracy as u -> 0.
double bennet_h_closed(double u);

/// e^{-lambda} (e lambda / eps)^eps, an upper bound on P{Poiss(lambda) >= eps}
/// whenever eps >= lambda.
TailBound poisson_tail_bound(double lambda, double eps);

/// Piecewise MGF remainder psi(t, p) for 0 < t < log(1/p)/2, p <= 1/30.
/// The branch point t = 1/2 belongs to the second branch.
double psi(double t, double p);

/// Right-hand side of the envelope (e^{Kt} - K^2 t^2/2 - Kt - 1)/(K^2/2) that
/// dominates psi.
double psi_envelope(double t, double K = kDefaultEnvelopeScale);

/// 1 + 2p^2 (e^{Kt} - Kt - 1)/K^2, valid for 0 < t <= log(1/(2p))/2.
double mgf_envelope_bound(double t, double p, double K = kDefaultEnvelopeScale);

/// Largest admissible t for mgf_envelope_bound: log(1/(2p))/2.
double mgf_envelope_t_max(double p);

/// Cramer-Chernoff tail exp(-(u^2/(2V)) h(Ku/V)) for a variable with the
/// given MGF envelope.
TailBound sub_poisson_tail(const TailEnvelope &env, double u);

/// Optimized Chernoff exponent -(u^2/(2V)) h(Ku/V) (no clamping).
double sub_poisson_exponent(const TailEnvelope &env, double u);

/// Chernoff objective V (e^{Kt} - Kt - 1)/K^2 - t u at a given t.
double chernoff_objective(const TailEnvelope &env, double u, double t);

/// Minimizer t* = log(1 + Ku/V)/K of chernoff_objective.
double chernoff_argmin(const TailEnvelope &env, double u);

/// |chernoff_objective(t*) - sub_poisson_exponent|; numeric check that the
/// closed-form optimum is right.
double chernoff_optimum_check(const TailEnvelope &env, double u);

}  // namespace sjlt::concentration
