#include <cmath>

#include "casl/error.hpp"
#include "casl/mat.hpp"
#include "doctest.h"

using namespace casl;

TEST_CASE("construction validates value count and finiteness") {
  CHECK_THROWS_AS(Mat(2, 2, {1.0, 2.0, 3.0}), ValidationError);
  CHECK_THROWS_AS(Mat::from_values({1.0, std::nan("")}, 1, 2), ValidationError);
  CHECK_THROWS_AS(Mat::from_values({1.0, INFINITY}, 2, 1), ValidationError);
  Mat ok = Mat::from_values({1.0, -2.0}, 1, 2);
  CHECK(ok.all_finite());
}

TEST_CASE("transpose round-trips and swaps indices") {
  Mat a(2, 3, {1, 2, 3, 4, 5, 6});
  Mat t = mat_transpose(a);
  CHECK(t.rows() == 3);
  CHECK(t(0, 1) == 4);
  CHECK(t(2, 0) == 3);
  Mat back = mat_transpose(t);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(back(i, j) == a(i, j));
}

TEST_CASE("elementwise kernels enforce matching shapes") {
  Mat a(2, 2), b(2, 3);
  CHECK_THROWS_AS(mat_add(a, b), ShapeError);
  CHECK_THROWS_AS(mat_sub(a, b), ShapeError);
  CHECK_THROWS_AS(mat_hadamard(a, b), ShapeError);
  Mat v(1, 3);
  CHECK_THROWS_AS(mat_add_rowvec(a, v), ShapeError);
}

TEST_CASE("row normalization produces unit rows and flags zero rows") {
  Mat a(2, 2, {3.0, 4.0, -1.0, 1.0});
  Mat n = mat_l2_normalize_rows(a, kNormEps);
  CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
  const double r1 = std::sqrt(n(1, 0) * n(1, 0) + n(1, 1) * n(1, 1));
  CHECK(r1 == doctest::Approx(1.0).epsilon(1e-12));

  Mat z(1, 3);
  CHECK_THROWS_AS(mat_l2_normalize_rows(z, kNormEps), ValidationError);
}

TEST_CASE("stable sigmoid agrees with the naive formula in the safe range") {
  for (double x : {-30.0, -2.0, -0.1, 0.0, 0.1, 2.0, 30.0}) {
    const double naive = 1.0 / (1.0 + std::exp(-x));
    CHECK(sigmoid(x) == doctest::Approx(naive).epsilon(1e-15));
  }
  // Far tails must not overflow to nan.
  CHECK(sigmoid(-1000.0) == 0.0);
  CHECK(sigmoid(1000.0) == 1.0);
}

TEST_CASE("row_sum and relu basics") {
  Mat a(2, 3, {1, -2, 3, -4, 5, -6});
  Mat s = mat_row_sum(a);
  CHECK(s.rows() == 2);
  CHECK(s.cols() == 1);
  CHECK(s(0, 0) == 2);
  CHECK(s(1, 0) == -5);
  Mat r = mat_relu(a);
  CHECK(r(0, 1) == 0);
  CHECK(r(1, 1) == 5);
}
