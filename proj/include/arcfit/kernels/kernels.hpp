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

#pragma once

// Data-parallel inner loops shared by the solver, the loss and the fitting
// code. Each kernel has a portable scalar reference and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once at runtime from CPUID and can
// be overridden with set_backend() or ARCFIT_KERNELS=scalar.

#include <cstddef>
#include <span>

namespace arcfit::kernels {

enum class Backend { Scalar, Avx2 };

struct CenteredMoments {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
};

// Function table implemented once per backend.
struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum_squared_diff)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  CenteredMoments (*centered_moments)(const double* x, const double* y, std::size_t n, double mx,
                                      double my);
  void (*hermite)(double theta, double h, const double* y0, const double* f0, const double* y1,
                  const double* f1, double* out, std::size_t n);
  void (*tridiag_apply)(const double* lower, const double* diag, const double* upper,
                        const double* x, double* out, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(ARCFIT_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

Backend active_backend();
bool backend_available(Backend backend);
/// Throws InvalidInput when the backend is not supported on this CPU.
void set_backend(Backend backend);
const char* backend_name(Backend backend);
const KernelTable& table_for(Backend backend);

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
/// Sum of (x_i - y_i)^2.
double sum_squared_diff(std::span<const double> x, std::span<const double> y);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// Second moments of (x - mx, y - my).
CenteredMoments centered_moments(std::span<const double> x, std::span<const double> y, double mx,
                                 double my);
/// Cubic Hermite interpolation at fraction theta of a step of length h.
void hermite(double theta, double h, std::span<const double> y0, std::span<const double> f0,
             std::span<const double> y1, std::span<const double> f1, std::span<double> out);
/// out_i = lower_i * x_{i-1} + diag_i * x_i + upper_i * x_{i+1}; lower_0 and upper_{n-1} unused.
void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> x,
                   std::span<double> out);

}  // namespace arcfit::kernels
