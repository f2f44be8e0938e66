#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace slotsync {

/// ln(e^a + e^b), exact for infinite arguments.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

/// Sum of e^{l_i} kept relative to the running maximum exponent, with
/// Kahan compensation, so terms far below 1e-300 still add up.
class LogSumAccumulator {
 public:
  void add_log(double l) {
    if (l == -std::numeric_limits<double>::infinity()) return;
    if (l > scale_) {
      const double r = std::isfinite(scale_) ? std::exp(scale_ - l) : 0.0;
      sum_ *= r;
      comp_ *= r;
      scale_ = l;
    }
    const double term = std::exp(l - scale_) - comp_;
    const double t = sum_ + term;
    comp_ = (t - sum_) - term;
    sum_ = t;
  }
  void add(double p) {
    if (p > 0.0) add_log(std::log(p));
  }
  void merge(const LogSumAccumulator& other) {
    if (other.sum_ > 0.0) add_log(other.log_value());
  }

  double log_value() const {
    return sum_ > 0.0 ? scale_ + std::log(sum_) : -std::numeric_limits<double>::infinity();
  }
  double value() const { return sum_ > 0.0 ? std::exp(log_value()) : 0.0; }

 private:
  double scale_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace slotsync
