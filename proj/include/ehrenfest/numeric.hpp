#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace ehrenfest {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_, im_;
};

inline double log_sum_exp(std::span<const double> logs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : logs) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  CompensatedSum acc;
  for (double v : logs) acc.add(std::exp(v - hi));
  return hi + std::log(acc.value());
}

inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

inline double log_multinomial(int n, std::span<const int> parts) {
  double out = log_factorial(n);
  for (int k : parts) out -= log_factorial(k);
  return out;
}

}  // namespace ehrenfest
