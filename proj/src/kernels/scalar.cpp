// Copyright 2026 The arcfit Authors.
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

#include "arcfit/kernels/kernels.hpp"

namespace arcfit::kernels {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squared_diff_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

CenteredMoments centered_moments_scalar(const double* x, const double* y, std::size_t n, double mx,
                                        double my) {
  CenteredMoments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    m.sxx += dx * dx;
    m.sxy += dx * dy;
    m.syy += dy * dy;
  }
  return m;
}

void hermite_scalar(double theta, double h, const double* y0, const double* f0, const double* y1,
                    const double* f1, double* out, std::size_t n) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = (t3 - 2.0 * t2 + theta) * h;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = (t3 - t2) * h;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = h00 * y0[i] + h10 * f0[i] + h01 * y1[i] + h11 * f1[i];
  }
}

void tridiag_apply_scalar(const double* lower, const double* diag, const double* upper,
                          const double* x, double* out, std::size_t n) {
  if (n == 0) return;
  if (n == 1) {
    out[0] = diag[0] * x[0];
    return;
  }
  out[0] = diag[0] * x[0] + upper[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
  }
  out[n - 1] = lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      sum_scalar,       dot_scalar,     sum_squared_diff_scalar, axpy_scalar,
      centered_moments_scalar, hermite_scalar, tridiag_apply_scalar,
  };
  return table;
}

}  // namespace arcfit::kernels
