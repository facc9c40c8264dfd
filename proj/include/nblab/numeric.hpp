#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace nblab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Value with a certified bound on its absolute error.
struct BracketedValue {
  double value = 0.0;
  double err = 0.0;

  double lower() const { return value - err; }
  double upper() const { return value + err; }
  bool contains(double x) const { return std::abs(x - value) <= err; }
};

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    ++count_;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }
  std::size_t count() const { return count_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace nblab
