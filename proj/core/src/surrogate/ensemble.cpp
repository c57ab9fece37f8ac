#include "acceldse/surrogate/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace acceldse {

bool solve_least_squares(const Matrix& a, const std::vector<double>& b,
                         std::vector<double>* out, double ridge) {
  const std::size_t n = a.size();
  const std::size_t k = a[0].size();
  // normal equations: (A^T A + ridge I) w = A^T b
  Matrix m(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += a[r][i] * a[r][j];
      m[i][j] = s + (i == j ? ridge : 0.0);
    }
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += a[r][i] * b[r];
    m[i][k] = s;
  }
  // Gaussian elimination with partial pivoting
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12) return false;
    std::swap(m[pivot], m[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c <= k; ++c) m[r][c] -= f * m[col][c];
    }
  }
  out->resize(k);
  for (std::size_t i = 0; i < k; ++i) (*out)[i] = m[i][k] / m[i][i];
  return true;
}

void StackedEnsemble::fit(const std::vector<BasePredictor>& bases, const Matrix& x_val,
                          const std::vector<double>& y_val) {
  if (bases.size() < 2)
    throw std::invalid_argument("stacked ensemble: need at least 2 base models");
  if (x_val.empty() || x_val.size() != y_val.size())
    throw std::invalid_argument("stacked ensemble: bad validation data");
  bases_ = bases;

  const std::size_t k = bases.size();
  Matrix design(x_val.size(), std::vector<double>(k + 1, 1.0));  // last column: intercept
  for (std::size_t r = 0; r < x_val.size(); ++r)
    for (std::size_t i = 0; i < k; ++i) design[r][i] = bases_[i](x_val[r]);

  ridge_fallback_ = false;
  if (!solve_least_squares(design, y_val, &weights_)) {
    ridge_fallback_ = true;
    if (!solve_least_squares(design, y_val, &weights_, 1e-6))
      throw std::runtime_error("stacked ensemble: normal equations unsolvable");
  }
}

double StackedEnsemble::predict(const std::vector<double>& x) const {
  double v = weights_.back();  // intercept
  for (std::size_t i = 0; i < bases_.size(); ++i) v += weights_[i] * bases_[i](x);
  return v;
}

}  // namespace acceldse
