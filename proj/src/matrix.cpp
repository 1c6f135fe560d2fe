#include "wlda/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wlda/errors.hpp"

namespace wlda {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols)
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) + " != " + std::to_string(rows) + "x" +
                         std::to_string(cols));
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const noexcept { return wlda::all_finite(data_); }

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols())
    throw DimensionError("matvec: vector length " + std::to_string(x.size()) + " != cols " + std::to_string(a.cols()));
  Vector y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x);
  return y;
}

Vector matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows())
    throw DimensionError("matvec_transposed: vector length " + std::to_string(x.size()) + " != rows " +
                         std::to_string(a.rows()));
  Vector y(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) axpy(y, a.row(r), x[r]);
  return y;
}

void add_outer(Matrix& a, std::span<const double> u, std::span<const double> v, double scale) {
  if (u.size() != a.rows() || v.size() != a.cols()) throw DimensionError("add_outer: shape mismatch");
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double s = scale * u[r];
    if (s == 0.0) continue;
    auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) row[c] += s * v[c];
  }
}

void axpy(std::span<double> y, std::span<const double> x, double scale) {
  if (y.size() != x.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * x[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace wlda
