#include "casl/mat.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "casl/error.hpp"

namespace casl {

namespace {

std::string shape_str(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) +
                     " vs " + shape_str(b));
  }
}

}  // namespace

Mat::Mat(int rows, int cols)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {
  if (rows < 0 || cols < 0) throw ShapeError("Mat: negative dimension");
}

Mat::Mat(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows < 0 || cols < 0) throw ShapeError("Mat: negative dimension");
  if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ShapeError("Mat: value count " + std::to_string(data_.size()) +
                     " does not match shape " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

Mat Mat::from_values(std::vector<double> values, int rows, int cols) {
  Mat m(rows, cols, std::move(values));
  if (!m.all_finite()) throw ValidationError("Mat: non-finite value in input");
  return m;
}

void Mat::fill(double v) {
  for (double& x : data_) x = v;
}

bool Mat::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions " + shape_str(a) + " * " +
                     shape_str(b));
  }
  Mat c(a.rows(), b.cols());
  const int n = a.rows(), k = a.cols(), m = b.cols();
  for (int i = 0; i < n; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (int p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = b.row(p);
      for (int j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

Mat mat_transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Mat mat_add(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "add");
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
  return c;
}

Mat mat_sub(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "sub");
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
  return c;
}

Mat mat_hadamard(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "hadamard");
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * b.data()[i];
  return c;
}

Mat mat_scale(const Mat& a, double s) {
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * s;
  return c;
}

Mat mat_add_rowvec(const Mat& a, const Mat& v) {
  if (v.rows() != 1 || v.cols() != a.cols()) {
    throw ShapeError("add_rowvec: vector " + shape_str(v) + " vs matrix " +
                     shape_str(a));
  }
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int j = 0; j < a.cols(); ++j) ci[j] = ai[j] + v(0, j);
  }
  return c;
}

Mat mat_relu(const Mat& a) {
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    c.data()[i] = x > 0.0 ? x : 0.0;
  }
  return c;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Mat mat_sigmoid(const Mat& a) {
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = sigmoid(a.data()[i]);
  return c;
}

Mat mat_exp(const Mat& a) {
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = std::exp(a.data()[i]);
  return c;
}

Mat mat_log(const Mat& a) {
  Mat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = std::log(a.data()[i]);
  return c;
}

Mat mat_row_sum(const Mat& a) {
  Mat c(a.rows(), 1);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    const double* ai = a.row(i);
    for (int j = 0; j < a.cols(); ++j) s += ai[j];
    c(i, 0) = s;
  }
  return c;
}

Mat mat_l2_normalize_rows(const Mat& a, double eps_norm) {
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double sq = 0.0;
    for (int j = 0; j < a.cols(); ++j) sq += ai[j] * ai[j];
    const double norm = std::sqrt(sq);
    if (norm <= eps_norm) {
      throw ValidationError("l2_normalize_rows: degenerate row " +
                            std::to_string(i) + " (norm " + std::to_string(norm) +
                            ")");
    }
    double* ci = c.row(i);
    for (int j = 0; j < a.cols(); ++j) ci[j] = ai[j] / norm;
  }
  return c;
}

}  // namespace casl
