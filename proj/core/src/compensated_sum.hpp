#pragma once

#include <cmath>

namespace compactness::detail {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + c_; }

private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace compactness::detail
