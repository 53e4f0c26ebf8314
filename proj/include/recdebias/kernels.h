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

#ifndef RECDEBIAS_KERNELS_H_
#define RECDEBIAS_KERNELS_H_

#include <cstddef>

// Dense double-precision kernels behind the factor-model inner loops
// (prediction dots, gradient accumulation, batch error sums). A scalar
// reference implementation is always available; AVX2 and NEON variants are
// selected once at startup from CPU features. SIMD variants reassociate
// the reductions, so they agree with the reference to rounding error, not
// bitwise; everything downstream only assumes that the selected backend is
// fixed for the lifetime of the process.
namespace recdebias::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

// Backend currently routing dot/axpy/sum_sq_diff.
Backend active_backend();

const char* backend_name(Backend backend);

// Installs a specific backend, or throws std::invalid_argument if this
// build/CPU cannot run it. Not thread safe; meant for tests and the CLI's
// --backend override.
void force_backend(Backend backend);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// sum_i (a[i] - b[i])^2
double sum_sq_diff(const double* a, const double* b, std::size_t n);

// Reference implementations (plain loops). The dispatched entry points
// above must match these within a small relative tolerance on any input.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
}  // namespace scalar

}  // namespace recdebias::kernels

#endif  // RECDEBIAS_KERNELS_H_
