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

// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "arcfit/kernels/kernels.hpp"

namespace arcfit::kernels {
namespace {

inline double reduce_add(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
  double s = reduce_add(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  }
  double s = reduce_add(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squared_diff_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
    a0 = _mm256_fmadd_pd(d0, d0, a0);
    a1 = _mm256_fmadd_pd(d1, d1, a1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    a0 = _mm256_fmadd_pd(d, d, a0);
  }
  double s = reduce_add(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

CenteredMoments centered_moments_avx2(const double* x, const double* y, std::size_t n, double mx,
                                      double my) {
  const __m256d vmx = _mm256_set1_pd(mx);
  const __m256d vmy = _mm256_set1_pd(my);
  __m256d sxx = _mm256_setzero_pd();
  __m256d sxy = _mm256_setzero_pd();
  __m256d syy = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), vmx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), vmy);
    sxx = _mm256_fmadd_pd(dx, dx, sxx);
    sxy = _mm256_fmadd_pd(dx, dy, sxy);
    syy = _mm256_fmadd_pd(dy, dy, syy);
  }
  CenteredMoments m{reduce_add(sxx), reduce_add(sxy), reduce_add(syy)};
  for (; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    m.sxx += dx * dx;
    m.sxy += dx * dy;
    m.syy += dy * dy;
  }
  return m;
}

void hermite_avx2(double theta, double h, const double* y0, const double* f0, const double* y1,
                  const double* f1, double* out, std::size_t n) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double c00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double c10 = (t3 - 2.0 * t2 + theta) * h;
  const double c01 = -2.0 * t3 + 3.0 * t2;
  const double c11 = (t3 - t2) * h;
  const __m256d v00 = _mm256_set1_pd(c00);
  const __m256d v10 = _mm256_set1_pd(c10);
  const __m256d v01 = _mm256_set1_pd(c01);
  const __m256d v11 = _mm256_set1_pd(c11);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(v00, _mm256_loadu_pd(y0 + i));
    r = _mm256_fmadd_pd(v10, _mm256_loadu_pd(f0 + i), r);
    r = _mm256_fmadd_pd(v01, _mm256_loadu_pd(y1 + i), r);
    r = _mm256_fmadd_pd(v11, _mm256_loadu_pd(f1 + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = c00 * y0[i] + c10 * f0[i] + c01 * y1[i] + c11 * f1[i];
}

void tridiag_apply_avx2(const double* lower, const double* diag, const double* upper,
                        const double* x, double* out, std::size_t n) {
  if (n < 6) {
    scalar_table().tridiag_apply(lower, diag, upper, x, out, n);
    return;
  }
  out[0] = diag[0] * x[0] + upper[0] * x[1];
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    __m256d r = _mm256_mul_pd(_mm256_loadu_pd(diag + i), _mm256_loadu_pd(x + i));
    r = _mm256_fmadd_pd(_mm256_loadu_pd(lower + i), _mm256_loadu_pd(x + i - 1), r);
    r = _mm256_fmadd_pd(_mm256_loadu_pd(upper + i), _mm256_loadu_pd(x + i + 1), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i + 1 < n; ++i) {
    out[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
  }
  out[n - 1] = lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      sum_avx2,       dot_avx2,     sum_squared_diff_avx2, axpy_avx2,
      centered_moments_avx2, hermite_avx2, tridiag_apply_avx2,
  };
  return table;
}

}  // namespace arcfit::kernels
