#pragma once

#include <cmath>

namespace sjlt {

/// Neumaier's variant of Kahan compensated summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum &operator+=(double v) noexcept {
    add(v);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_  = 0.0;
  double comp_ = 0.0;
};

/// Tail of the exponential series, e^x - sum_{k<order} x^k/k!, evaluated
/// without cancellation for small |x|.
double exp_remainder(double x, int order);

}  // namespace sjlt
