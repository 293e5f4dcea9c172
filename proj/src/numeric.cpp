#include "sjlt/numeric.hpp"

#include "sjlt/errors.hpp"

namespace sjlt {

double exp_remainder(double x, int order) {
  if (order < 0) {
    throw DomainError("exp_remainder: order must be nonnegative");
  }
  if (order == 0) {
    return std::exp(x);
  }
  if (std::fabs(x) > 1.0) {
    // Direct form; relative cancellation is bounded once |x| > 1.
    double partial = 0.0;
    double term    = 1.0;
    for (int k = 0; k < order; ++k) {
      partial += term;
      term *= x / (k + 1);
    }
    return std::expm1(x) - (partial - 1.0);
  }
  // Series from the first retained term x^order/order!.
  double term = 1.0;
  for (int k = 1; k <= order; ++k) {
    term *= x / k;
  }
  double sum = 0.0;
  for (int k = order + 1; k < order + 60; ++k) {
    sum += term;
    term *= x / k;
    if (std::fabs(term) <= 1e-18 * std::fabs(sum)) {
      sum += term;
      break;
    }
  }
  return sum;
}

}  // namespace sjlt
