#pragma once
// Shared basics: error types, extended scores, small numeric helpers.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace sac {

// Raised on bad user input (CLI maps this to exit code 1).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on file problems (CLI maps this to exit code 2).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scores live on the extended real line; divergent rules hit -inf at the
// endpoints and the value must propagate, never turn into NaN.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0; }

inline double log_gamma(double x) { return std::lgamma(x); }

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace sac
