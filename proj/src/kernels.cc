// Copyright 2026 The recdebias Authors.
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

#include "recdebias/kernels.h"

#include <stdexcept>
#include <string>

#include "kernels_backends.h"

namespace recdebias::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace scalar

namespace {

struct Vtable {
  Backend id;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum_sq_diff)(const double*, const double*, std::size_t);
};

constexpr Vtable kScalarTable{Backend::kScalar, scalar::dot, scalar::axpy,
                              scalar::sum_sq_diff};

bool backend_supported(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#ifdef RECDEBIAS_HAVE_AVX2_BUILD
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
#ifdef RECDEBIAS_HAVE_NEON_BUILD
      return true;  // NEON is mandatory on aarch64.
#else
      return false;
#endif
  }
  return false;
}

Vtable table_for(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return kScalarTable;
#ifdef RECDEBIAS_HAVE_AVX2_BUILD
    case Backend::kAvx2:
      return Vtable{Backend::kAvx2, avx2::dot, avx2::axpy, avx2::sum_sq_diff};
#endif
#ifdef RECDEBIAS_HAVE_NEON_BUILD
    case Backend::kNeon:
      return Vtable{Backend::kNeon, neon::dot, neon::axpy, neon::sum_sq_diff};
#endif
    default:
      return kScalarTable;
  }
}

Vtable pick_default() {
  if (backend_supported(Backend::kAvx2)) return table_for(Backend::kAvx2);
  if (backend_supported(Backend::kNeon)) return table_for(Backend::kNeon);
  return kScalarTable;
}

Vtable g_active = pick_default();

}  // namespace

Backend active_backend() { return g_active.id; }

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

void force_backend(Backend backend) {
  if (!backend_supported(backend)) {
    throw std::invalid_argument(std::string("kernel backend not available: ") +
                                backend_name(backend));
  }
  g_active = table_for(backend);
}

double dot(const double* a, const double* b, std::size_t n) {
  return g_active.dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  g_active.axpy(alpha, x, y, n);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  return g_active.sum_sq_diff(a, b, n);
}

}  // namespace recdebias::kernels
