#include "lgcf/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "lgcf/errors.hpp"

namespace lgcf {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ContractViolation("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ContractViolation("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double s = a(i, p);
      if (s == 0.0) continue;
      auto in = b.row(p);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += s * in[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ContractViolation("matmul_tn: row counts differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t p = 0; p < a.rows(); ++p) {
    auto in = b.row(p);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(p, i);
      if (s == 0.0) continue;
      auto out = c.row(i);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += s * in[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ContractViolation("matmul_nt: column counts differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto x = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto y = b.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < x.size(); ++p) s += x[p] * y[p];
      c(i, j) = s;
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

void axpy(double scale, const Matrix& src, Matrix& dst) {
  if (src.rows() != dst.rows() || src.cols() != dst.cols()) {
    throw ContractViolation("axpy: shapes differ");
  }
  auto s = src.values();
  auto d = dst.values();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] += scale * s[k];
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractViolation("max_abs_diff: shapes differ");
  }
  double m = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

}  // namespace lgcf
