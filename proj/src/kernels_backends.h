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

// Internal declarations of the per-backend kernel variants. Each variant
// lives in its own translation unit so it can be compiled with the matching
// target flags; kernels.cc wires them into the dispatch table.

#ifndef RECDEBIAS_SRC_KERNELS_BACKENDS_H_
#define RECDEBIAS_SRC_KERNELS_BACKENDS_H_

#include <cstddef>

#if defined(__x86_64__) || defined(__i386__)
#define RECDEBIAS_HAVE_AVX2_BUILD 1
#endif

#if defined(__aarch64__)
#define RECDEBIAS_HAVE_NEON_BUILD 1
#endif

namespace recdebias::kernels {

#ifdef RECDEBIAS_HAVE_AVX2_BUILD
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

#ifdef RECDEBIAS_HAVE_NEON_BUILD
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
}  // namespace neon
#endif

}  // namespace recdebias::kernels

#endif  // RECDEBIAS_SRC_KERNELS_BACKENDS_H_
