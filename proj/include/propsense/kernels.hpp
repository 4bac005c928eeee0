// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The propsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Data-parallel inner loops. Every kernel has a portable scalar reference and,
// where the CPU supports it, an AVX2/FMA variant. The active table is chosen
// once at first use from cpuid, and can be forced with the environment
// variable PROPSENSE_SIMD=scalar|avx2.
//
// Complex arrays are std::complex<double>, i.e. interleaved (re, im).

#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace propsense::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;

  // out[i] = a[i] * b[i]
  void (*multiply)(const double *a, const double *b, double *out, std::size_t n);

  // out[i] += a[i]
  void (*accumulate)(const double *a, double *out, std::size_t n);

  // out[i] += gain * sum_k taps[k] * in[i + k], k in [0, ntaps)
  void (*fir_accumulate)(const double *in, const double *taps, std::size_t ntaps,
                         double gain, double *out, std::size_t n);

  // s11[i] = |x1|^2, s22[i] = |x2|^2, s12[i] = x1 * conj(x2)
  void (*cross_spectra)(const cplx *x1, const cplx *x2, double *s11, double *s22,
                        cplx *s12, std::size_t n);

  // c[i] = conj(w1) (s11 v1 + s12 v2) + conj(w2) (conj(s12) v1 + s22 v2)
  void (*bilinear_form)(const double *s11, const double *s22, const cplx *s12,
                        const cplx *w1, const cplx *w2, const cplx *v1,
                        const cplx *v2, cplx *c, std::size_t n);

  // c[i] = weight[i] * c[i] / (|c[i]| + eps)
  void (*whiten)(cplx *c, const double *weight, double eps, std::size_t n);

  // out[i] = |z[i]|
  void (*magnitude)(const cplx *z, double *out, std::size_t n);
};

// Table selected for this process.
const KernelTable &active();

// Table for a specific ISA; nullptr if the ISA is unavailable on this CPU or
// was not compiled in.
const KernelTable *table_for(Isa isa);

std::string_view name(Isa isa) noexcept;

} // namespace propsense::kernels
