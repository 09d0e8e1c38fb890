#pragma once

#include <cstddef>
#include <vector>

namespace casl {

// Dense row-major matrix of doubles. Everything trainable or batched in the
// engine is a rank-2 array; vectors are 1xN or Nx1.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols);  // zero-filled
  Mat(int rows, int cols, std::vector<double> values);

  // Validating constructor: length must match and every value be finite.
  static Mat from_values(std::vector<double> values, int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool empty() const { return data_.empty(); }

  void fill(double v);
  bool all_finite() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Kernels. Shape mismatches throw ShapeError. The same kernels back both the
// plain forward path and the autodiff graph so the two are bit-identical.
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_transpose(const Mat& a);
Mat mat_add(const Mat& a, const Mat& b);
Mat mat_sub(const Mat& a, const Mat& b);
Mat mat_hadamard(const Mat& a, const Mat& b);
Mat mat_scale(const Mat& a, double s);
Mat mat_add_rowvec(const Mat& a, const Mat& v);  // v is 1 x a.cols()
Mat mat_relu(const Mat& a);
Mat mat_sigmoid(const Mat& a);
Mat mat_exp(const Mat& a);
Mat mat_log(const Mat& a);
Mat mat_row_sum(const Mat& a);  // rows x 1
// Unit-norm rows; a row with norm <= eps_norm is a degenerate input.
Mat mat_l2_normalize_rows(const Mat& a, double eps_norm);

double sigmoid(double x);

inline constexpr double kNormEps = 1e-12;

}  // namespace casl
