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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "arcfit/errors.hpp"
#include "arcfit/kernels/kernels.hpp"

namespace arcfit::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ARCFIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("ARCFIT_KERNELS")) {
    if (std::string_view(env) == "scalar") return Backend::Scalar;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

const KernelTable& active() { return table_for(current().load(std::memory_order_relaxed)); }

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidInput("kernel operands differ in length");
}

}  // namespace

Backend active_backend() { return current().load(); }

bool backend_available(Backend backend) {
  return backend == Backend::Scalar || cpu_has_avx2();
}

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw InvalidInput(std::string("kernel backend not available: ") + backend_name(backend));
  }
  current().store(backend);
}

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& table_for(Backend backend) {
#if defined(ARCFIT_HAVE_AVX2)
  if (backend == Backend::Avx2) return avx2_table();
#else
  (void)backend;
#endif
  return scalar_table();
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_size(x.size(), y.size());
  return active().dot(x.data(), y.data(), x.size());
}

double sum_squared_diff(std::span<const double> x, std::span<const double> y) {
  require_same_size(x.size(), y.size());
  return active().sum_squared_diff(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

CenteredMoments centered_moments(std::span<const double> x, std::span<const double> y, double mx,
                                 double my) {
  require_same_size(x.size(), y.size());
  return active().centered_moments(x.data(), y.data(), x.size(), mx, my);
}

void hermite(double theta, double h, std::span<const double> y0, std::span<const double> f0,
             std::span<const double> y1, std::span<const double> f1, std::span<double> out) {
  const std::size_t n = out.size();
  require_same_size(y0.size(), n);
  require_same_size(f0.size(), n);
  require_same_size(y1.size(), n);
  require_same_size(f1.size(), n);
  active().hermite(theta, h, y0.data(), f0.data(), y1.data(), f1.data(), out.data(), n);
}

void tridiag_apply(std::span<const double> lower, std::span<const double> diag,
                   std::span<const double> upper, std::span<const double> x,
                   std::span<double> out) {
  const std::size_t n = x.size();
  require_same_size(lower.size(), n);
  require_same_size(diag.size(), n);
  require_same_size(upper.size(), n);
  require_same_size(out.size(), n);
  active().tridiag_apply(lower.data(), diag.data(), upper.data(), x.data(), out.data(), n);
}

}  // namespace arcfit::kernels
