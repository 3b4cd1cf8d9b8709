#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "mrplab/errors.hpp"

namespace mrplab {

inline constexpr double kZ95 = 1.959964;

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Pairwise summation in fixed index order: deterministic and O(log n) error growth.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double mean_of(std::span<const double> xs) {
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

// Sample standard deviation (K - 1 denominator).
inline double sample_sd(std::span<const double> xs, double mean) {
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(xs.size() - 1));
}

struct Interval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double standard_error = 0.0;
};

// Mean of squared errors with a normal interval: mean +- z * sd(squared) / sqrt(K).
inline Interval mse_with_ci(std::span<const double> errors, double z = kZ95) {
  if (errors.size() < 2) throw TooFewSamplesError("mse_with_ci needs at least 2 errors");
  std::vector<double> sq(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) sq[i] = errors[i] * errors[i];
  const double mse = mean_of(sq);
  const double se = sample_sd(sq, mse) / std::sqrt(static_cast<double>(sq.size()));
  return {mse, mse - z * se, mse + z * se, se};
}

// Ratio of mean squares of paired samples, mean(a^2) / mean(b^2), with a
// delta-method normal interval: se = sd(a^2 - R b^2) / (sqrt(K) mean(b^2)).
inline Interval ratio_with_ci(std::span<const double> num_errors, std::span<const double> den_errors,
                              double z = kZ95) {
  if (num_errors.size() < 2 || num_errors.size() != den_errors.size()) {
    throw TooFewSamplesError("ratio_with_ci needs at least 2 paired errors");
  }
  const std::size_t k = num_errors.size();
  std::vector<double> a(k);
  std::vector<double> b(k);
  for (std::size_t i = 0; i < k; ++i) {
    a[i] = num_errors[i] * num_errors[i];
    b[i] = den_errors[i] * den_errors[i];
  }
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  if (!(mb > 0.0)) return {ma == 0.0 ? 1.0 : INFINITY, 0.0, INFINITY, INFINITY};
  const double r = ma / mb;
  std::vector<double> lin(k);
  for (std::size_t i = 0; i < k; ++i) lin[i] = a[i] - r * b[i];
  const double se = sample_sd(lin, mean_of(lin)) / (std::sqrt(static_cast<double>(k)) * mb);
  return {r, r - z * se, r + z * se, se};
}

// log P(X = x) for X ~ Binomial(k, q).
inline double binomial_log_pmf(std::uint64_t x, std::uint64_t k, double q) {
  if (q <= 0.0) return x == 0 ? 0.0 : -INFINITY;
  if (q >= 1.0) return x == k ? 0.0 : -INFINITY;
  const double kd = static_cast<double>(k);
  const double xd = static_cast<double>(x);
  return std::lgamma(kd + 1.0) - std::lgamma(xd + 1.0) - std::lgamma(kd - xd + 1.0) +
         xd * std::log(q) + (kd - xd) * std::log1p(-q);
}

struct CountInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

// Exact central acceptance region [lo, hi] for X ~ Binomial(k, q): each tail
// outside it carries probability at most alpha / 2.
inline CountInterval binomial_acceptance_interval(std::uint64_t k, double q, double alpha = 0.05) {
  std::vector<double> pmf(k + 1);
  for (std::uint64_t x = 0; x <= k; ++x) pmf[x] = std::exp(binomial_log_pmf(x, k, q));
  CountInterval out{0, k};
  double below = 0.0;
  for (std::uint64_t x = 0; x <= k; ++x) {
    if (below + pmf[x] > alpha / 2) {
      out.lo = x;
      break;
    }
    below += pmf[x];
  }
  double above = 0.0;
  for (std::uint64_t x = k + 1; x-- > 0;) {
    if (above + pmf[x] > alpha / 2) {
      out.hi = x;
      break;
    }
    above += pmf[x];
  }
  return out;
}

}  // namespace mrplab
