// Copyright 2026 The ECO Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ECO_MATRIX_H_
#define ECO_MATRIX_H_

#include <cmath>
#include <cstddef>
#include <vector>

#include "eco/common.hpp"
#include "eco/rng.hpp"

namespace eco {

// Dense row-major matrix of doubles. Column vectors are Mat with cols == 1.
// This is deliberately minimal: the model is small enough that a plain
// double loop beats the complexity of pulling in a BLAS.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {
    ECO_CHECK(r >= 0 && c >= 0, "Mat: negative shape " << r << "x" << c);
  }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  size_t size() const { return a.size(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
  bool is_vector() const { return cols == 1; }
  bool is_scalar() const { return rows == 1 && cols == 1; }

  void fill(double v) { std::fill(a.begin(), a.end(), v); }

  static Mat zeros(int r, int c) { return Mat(r, c); }

  static Mat uniform(int r, int c, double lo, double hi, Rng& rng) {
    Mat m(r, c);
    for (double& x : m.a) x = rng.uniform(lo, hi);
    return m;
  }

  static Mat column(std::vector<double> v) {
    Mat m;
    m.rows = static_cast<int>(v.size());
    m.cols = 1;
    m.a = std::move(v);
    return m;
  }
};

inline bool has_nan(const Mat& m) {
  for (double x : m.a) {
    if (std::isnan(x) || std::isinf(x)) return true;
  }
  return false;
}

inline int argmax_lowest(const Mat& v) {
  ECO_CHECK(v.is_vector() && v.rows > 0, "argmax: expected non-empty vector");
  int best = 0;
  for (int i = 1; i < v.rows; ++i) {
    if (v.a[i] > v.a[best]) best = i;  // strict ">" keeps the lowest index on ties
  }
  return best;
}

}  // namespace eco

#endif  // ECO_MATRIX_H_
