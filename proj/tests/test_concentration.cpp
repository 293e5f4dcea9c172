#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "sjlt/concentration.hpp"
#include "sjlt/errors.hpp"
#include "sjlt/numeric.hpp"
#include "sjlt/oracle.hpp"
#include "support/oracles.hpp"

using namespace sjlt;
using namespace sjlt::concentration;

namespace {

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return out;
}

bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

TEST_CASE("exp_remainder matches the direct form away from zero") {
  for (double x : {0.3, 0.9, 1.5, 4.0, 12.5}) {
    CHECK(rel_close(exp_remainder(x, 2), std::exp(x) - x - 1.0, 1e-13));
    CHECK(rel_close(exp_remainder(x, 3), std::exp(x) - x * x / 2 - x - 1.0, 1e-12));
  }
  // e^x - 1 - x - x^2/2 ~ x^3/6 for tiny x.
  CHECK(rel_close(exp_remainder(1e-6, 3), 1e-18 / 6.0, 1e-6));
  CHECK(exp_remainder(0.0, 3) == 0.0);
}

TEST_CASE("bennet_h reference values") {
  CHECK(std::fabs(bennet_h(1e-8) - 1.0) <= 1e-8);
  CHECK(bennet_h(0.0) == 1.0);

  const double u = std::numbers::e - 1.0;
  CHECK(rel_close(bennet_h(u), 2.0 / (u * u), 1e-14));

  // mpmath, 50 digits: h(37.5) = 0.146560486812172705820...
  const double h375 = bennet_h(37.5);
  CHECK(h375 > 0.146);
  CHECK(h375 < 0.147);
  CHECK(rel_close(h375, 0.14656048681217270582, 1e-14));

  CHECK(rel_close(bennet_h(25.0), (26.0 * std::log(26.0) - 25.0) / 312.5, 1e-14));
  CHECK(bennet_h(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("bennet_h rejects negative arguments") {
  CHECK_THROWS_AS(bennet_h(-1e-9), DomainError);
  CHECK_THROWS_AS(bennet_h(std::nan("")), DomainError);
}

TEST_CASE("bennet_h agrees with an independent quadrature on small arguments") {
  double worst = 0.0;
  for (double u : logspace(1e-12, 1e-2, 200)) {
    const double ref = testing::bennet_h_quadrature(u);
    worst            = std::max(worst, std::fabs(bennet_h(u) - ref) / ref);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("series and closed form agree on small arguments") {
  for (double u : logspace(1e-12, 1e-2, 200)) {
    CHECK(rel_close(bennet_h(u), bennet_h_closed(u), 1e-12));
  }
  // The 5-term truncation error u^5/21 stays below 1e-12 up to about 3e-3.
  for (double u : logspace(1e-12, 3e-3, 100)) {
    CHECK(rel_close(bennet_h_series(u, 5), bennet_h_closed(u), 1e-12));
  }
  for (double u : logspace(1e-4, 1e-2, 50)) {
    CHECK(rel_close(bennet_h_series(u, 8), bennet_h_closed(u), 1e-12));
  }
  const double below = std::nextafter(kBennetSeriesThreshold, 0.0);
  CHECK(rel_close(bennet_h(below), bennet_h(kBennetSeriesThreshold), 1e-12));
}

TEST_CASE("bennet_h is strictly decreasing with values in (0, 1)") {
  double prev = 1.0;
  for (double u : logspace(1e-6, 1e6, 400)) {
    const double h = bennet_h(u);
    CHECK(h > 0.0);
    CHECK(h < 1.0);
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("poisson_tail_bound examples") {
  const auto at_mean = poisson_tail_bound(1.0, 1.0);
  CHECK(at_mean.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(at_mean.vacuous);

  const auto b = poisson_tail_bound(1.0, 4.0);
  CHECK(rel_close(b.value, std::exp(3.0) / 256.0, 1e-14));
  CHECK_FALSE(b.vacuous);
  // 1 - e^{-1}(1 + 1 + 1/2 + 1/6), mpmath.
  CHECK(b.value >= 0.018988156876153809);

  CHECK_THROWS_AS(poisson_tail_bound(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(poisson_tail_bound(1.0, -2.0), DomainError);
}

TEST_CASE("poisson tail oracle agrees with the regularized incomplete gamma") {
  for (double lambda : {0.5, 1.0, 2.0, 4.0, 9.5}) {
    for (std::uint64_t k = 1; k < 30; ++k) {
      const double direct = oracle::poisson_upper_tail(lambda, k);
      const double gamma  = boost::math::gamma_p(static_cast<double>(k), lambda);
      CHECK(rel_close(direct, gamma, 1e-12));
    }
  }
  CHECK(oracle::poisson_upper_tail(1.0, 0) == 1.0);
}

TEST_CASE("poisson_tail_bound dominates the exact tail for eps >= lambda") {
  for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
    for (int eps = static_cast<int>(std::ceil(lambda)); eps <= lambda + 10.0; ++eps) {
      const double bound = poisson_tail_bound(lambda, eps).value;
      const double exact = oracle::poisson_upper_tail(lambda, static_cast<std::uint64_t>(eps));
      CHECK(bound >= exact);
      CHECK(bound <= 1.0);
    }
  }
}

TEST_CASE("psi vanishes at the origin") {
  for (double p : {1.0 / 30.0, 0.01, 1e-4}) {
    const double v = psi(1e-9, p);
    CHECK(v >= 0.0);
    CHECK(v < 1e-17);
  }
}

TEST_CASE("psi examples") {
  const double p = 1.0 / 30.0;
  CHECK(psi(0.25, p) <= (std::exp(12.5) - 1250.0 * 0.0625 - 12.5 - 1.0) / 1250.0);
  CHECK(rel_close(psi_envelope(0.25), (std::exp(12.5) - 1250.0 * 0.0625 - 12.5 - 1.0) / 1250.0,
                  1e-13));

  const double before = psi(std::nextafter(0.5, 0.0), 0.01);
  const double at      = psi(0.5, 0.01);
  CHECK(std::isfinite(before));
  CHECK(std::isfinite(at));
  CHECK(before < psi_envelope(0.5));
  CHECK(at < psi_envelope(0.5));

  // t = 1/2 takes the second branch.
  const double second = std::exp(2.0) - 2.0 - 2.0 - 1.0 + 0.01 * std::exp(3.0) / (1.0 - 0.01 * std::numbers::e);
  CHECK(rel_close(at, second, 1e-13));
}

TEST_CASE("psi domain") {
  CHECK_THROWS_AS(psi(0.0, 0.01), DomainError);
  CHECK_THROWS_AS(psi(-0.1, 0.01), DomainError);
  CHECK_THROWS_AS(psi(0.5 * std::log(100.0), 0.01), DomainError);
  CHECK_THROWS_AS(psi(0.1, 0.05), DomainError);
  CHECK_THROWS_AS(psi(0.1, 0.0), DomainError);
  CHECK_NOTHROW(psi(0.1, 1.0 / 30.0));
}

TEST_CASE("mgf_envelope_bound examples") {
  const double p = 1.0 / 30.0;
  CHECK(mgf_envelope_bound(1e-12, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel_close(mgf_envelope_bound(0.1, p),
                  1.0 + 2.0 * p * p * (std::exp(5.0) - 5.0 - 1.0) / 2500.0, 1e-14));
  const double t_max = mgf_envelope_t_max(p);
  CHECK(std::isfinite(mgf_envelope_bound(t_max, p)));
  CHECK_THROWS_AS(mgf_envelope_bound(std::nextafter(t_max, 10.0), p), DomainError);
  CHECK_THROWS_AS(mgf_envelope_bound(0.0, p), DomainError);
  for (double t : logspace(1e-6, t_max, 50)) {
    CHECK(mgf_envelope_bound(t, p) >= 1.0);
  }
}

TEST_CASE("the MGF of Z stays below the K=50 envelope on dense grids") {
  for (double p : {0.01, 1.0 / 30.0}) {
    const double t_max = mgf_envelope_t_max(p);
    for (int j = 1; j <= 5000; ++j) {
      const double t   = std::min(t_max, t_max * j / 5000.0);
      const double lhs = 1.0 + t * t * p * p + p * p * psi(t, p);
      CHECK(lhs <= mgf_envelope_bound(t, p) * (1.0 + 1e-15));
    }
  }
}

TEST_CASE("sub_poisson_tail examples") {
  const auto tiny = sub_poisson_tail({1.0, 1.0}, 1e-6);
  CHECK(std::fabs(tiny.value - (1.0 - 5e-13)) <= 1e-15);

  // h(25) = (26 log 26 - 25) / 312.5; exponent 0.25 h(25) = 0.0477684079908468...
  const auto b = sub_poisson_tail({2.0, 50.0}, 1.0);
  CHECK(rel_close(b.value, std::exp(-0.25 * (26.0 * std::log(26.0) - 25.0) / 312.5), 1e-14));
  CHECK(rel_close(b.value, std::exp(-0.047768407990846827), 1e-14));

  const auto degenerate = sub_poisson_tail({0.0, 50.0}, 0.5);
  CHECK(degenerate.value == 0.0);
  CHECK_THROWS_AS(sub_poisson_tail({-1.0, 50.0}, 0.5), DomainError);
  CHECK_THROWS_AS(sub_poisson_tail({1.0, 0.0}, 0.5), DomainError);
  CHECK_THROWS_AS(sub_poisson_tail({1.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("sub_poisson_tail monotonicity and Gaussian limit") {
  for (double V : {0.1, 1.0, 10.0}) {
    double prev = 1.0;
    for (double u : logspace(1e-3, 100.0, 100)) {
      const double v = sub_poisson_tail({V, 50.0}, u).value;
      CHECK(v <= prev);
      prev = v;
    }
  }
  for (double u : {0.01, 0.5, 3.0}) {
    double prev = 0.0;
    for (double V : logspace(1e-2, 1e2, 100)) {
      const double v = sub_poisson_tail({V, 50.0}, u).value;
      CHECK(v >= prev);
      prev = v;
    }
  }
  for (double V : {0.5, 1.0, 4.0}) {
    for (double u : {0.1, 1.0, 2.0}) {
      const double gauss = std::exp(-u * u / (2.0 * V));
      CHECK(rel_close(sub_poisson_tail({V, 1e-10}, u).value, gauss, 1e-8));
    }
  }
}

TEST_CASE("Chernoff optimum at V=K=u=1 is 1 - 2 log 2") {
  const TailEnvelope env{1.0, 1.0};
  const double expected = 1.0 - 2.0 * std::numbers::ln2;
  CHECK(rel_close(chernoff_argmin(env, 1.0), std::numbers::ln2, 1e-15));
  CHECK(rel_close(chernoff_objective(env, 1.0, std::numbers::ln2), expected, 1e-14));
  CHECK(rel_close(sub_poisson_exponent(env, 1.0), expected, 1e-14));
  CHECK(rel_close(-0.5 * bennet_h(1.0), expected, 1e-14));

  // Golden-section search over t as an independent minimizer.
  double lo = 0.0, hi = 3.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (chernoff_objective(env, 1.0, a) < chernoff_objective(env, 1.0, b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  CHECK(std::fabs(chernoff_objective(env, 1.0, 0.5 * (lo + hi)) - expected) <= 1e-14);
}

TEST_CASE("chernoff_optimum_check examples and grid") {
  CHECK(chernoff_optimum_check({1.0, 1.0}, 1.0) <= 1e-12);
  CHECK(chernoff_optimum_check({2.0, 50.0}, 1.0) <= 1e-12);
  CHECK(chernoff_optimum_check({1.0, 1.0}, 1e-8) <= 1e-12);

  const auto grid = oracle::check_chernoff_grid();
  CHECK(grid.points.size() == 100);
  CHECK(grid.max_residual <= 1e-12);
  CHECK(grid.passed());
}
