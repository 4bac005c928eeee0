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

// Scalar reference kernels. These define the semantics the SIMD variants are
// tested against.

#include <cmath>

#include "kernels_internal.hpp"

namespace propsense::kernels::detail {
namespace {

void multiply(const double *a, const double *b, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a[i] * b[i];
}

void accumulate(const double *a, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] += a[i];
}

void fir_accumulate(const double *in, const double *taps, std::size_t ntaps,
                    double gain, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ntaps; ++k)
      acc += taps[k] * in[i + k];
    out[i] += gain * acc;
  }
}

void cross_spectra(const cplx *x1, const cplx *x2, double *s11, double *s22,
                   cplx *s12, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = x1[i].real(), ai = x1[i].imag();
    const double br = x2[i].real(), bi = x2[i].imag();
    s11[i] = ar * ar + ai * ai;
    s22[i] = br * br + bi * bi;
    s12[i] = {ar * br + ai * bi, ai * br - ar * bi};
  }
}

void bilinear_form(const double *s11, const double *s22, const cplx *s12,
                   const cplx *w1, const cplx *w2, const cplx *v1,
                   const cplx *v2, cplx *c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const cplx row1 = s11[i] * v1[i] + s12[i] * v2[i];
    const cplx row2 = std::conj(s12[i]) * v1[i] + s22[i] * v2[i];
    c[i] = std::conj(w1[i]) * row1 + std::conj(w2[i]) * row2;
  }
}

void whiten(cplx *c, const double *weight, double eps, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mag =
        std::sqrt(c[i].real() * c[i].real() + c[i].imag() * c[i].imag());
    c[i] *= weight[i] / (mag + eps);
  }
}

void magnitude(const cplx *z, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::sqrt(z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
}

constexpr KernelTable kTable{
    Isa::scalar,   multiply,      accumulate, fir_accumulate, cross_spectra,
    bilinear_form, whiten,        magnitude,
};

} // namespace

const KernelTable &scalar_table() { return kTable; }

} // namespace propsense::kernels::detail
