#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrplab/errors.hpp"

namespace mrplab {

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Pivots below this magnitude are treated as a singular system.
inline constexpr double kPivotThreshold = 1e-12;

// Dense LU factorization with partial pivoting, PA = LU.
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a, double pivot_threshold = kPivotThreshold)
      : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw UsageError("LU of a non-square matrix");
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const double v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best < pivot_threshold) {
        throw SingularSystemError("singular system: pivot " + std::to_string(best) +
                                  " at column " + std::to_string(k));
      }
      if (p != k) {
        std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
        std::swap(perm_[k], perm_[p]);
      }
      const double pivot = lu_(k, k);
      auto rk = lu_.row(k);
      for (std::size_t i = k + 1; i < n; ++i) {
        auto ri = lu_.row(i);
        const double m = ri[k] / pivot;
        ri[k] = m;
        if (m == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
      }
    }
  }

  std::size_t size() const noexcept { return lu_.rows(); }

  // Solves A x = b.
  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t n = size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
      auto ri = lu_.row(i);
      double s = x[i];
      for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      auto ri = lu_.row(i);
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * x[j];
      x[i] = s / ri[i];
    }
    return x;
  }

  // Solves x^T A = b^T, i.e. A^T x = b.
  std::vector<double> solve_transposed(std::span<const double> b) const {
    const std::size_t n = size();
    // A^T = U^T L^T P, so solve U^T y = b, L^T z = y, x = P^T z.
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[i];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * y[j];
      y[i] = s / lu_(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(j, i) * y[j];
      y[i] = s;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
    return x;
  }

  Matrix inverse() const {
    const std::size_t n = size();
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      e[c] = 1.0;
      const auto col = solve(e);
      e[c] = 0.0;
      for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
  }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace mrplab
