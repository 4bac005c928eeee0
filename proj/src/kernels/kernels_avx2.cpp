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

// AVX2/FMA variants. Functions carry a target attribute so this translation
// unit builds without global -mavx2; dispatch only hands them out after a
// runtime cpuid check.

#include "kernels_internal.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define PROPSENSE_HAVE_AVX2 1
#include <immintrin.h>
#endif

#include <cmath>

namespace propsense::kernels::detail {

#if defined(PROPSENSE_HAVE_AVX2)
namespace {

#define PS_AVX2 __attribute__((target("avx2,fma")))

// Two interleaved complex values per register: [re0, im0, re1, im1].

PS_AVX2 inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0b1111);
  const __m256d a_sw = _mm256_permute_pd(a, 0b0101);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

PS_AVX2 inline __m256d conj(__m256d a) {
  return _mm256_xor_pd(a, _mm256_set_pd(-0.0, 0.0, -0.0, 0.0));
}

// [x0, x1] -> [x0, x0, x1, x1]
PS_AVX2 inline __m256d dup_pairs(const double *p) {
  const __m256d v = _mm256_castpd128_pd256(_mm_loadu_pd(p));
  return _mm256_permute4x64_pd(v, 0b01010000);
}

PS_AVX2 inline const double *as_doubles(const cplx *p) {
  return reinterpret_cast<const double *>(p);
}
PS_AVX2 inline double *as_doubles(cplx *p) { return reinterpret_cast<double *>(p); }

PS_AVX2 void multiply(const double *a, const double *b, double *out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i)
    out[i] = a[i] * b[i];
}

PS_AVX2 void accumulate(const double *a, double *out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_loadu_pd(a + i)));
  for (; i < n; ++i)
    out[i] += a[i];
}

PS_AVX2 void fir_accumulate(const double *in, const double *taps, std::size_t ntaps,
                            double gain, double *out, std::size_t n) {
  const __m256d g = _mm256_set1_pd(gain);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (std::size_t k = 0; k < ntaps; ++k) {
      const __m256d t = _mm256_broadcast_sd(taps + k);
      acc0 = _mm256_fmadd_pd(t, _mm256_loadu_pd(in + i + k), acc0);
      acc1 = _mm256_fmadd_pd(t, _mm256_loadu_pd(in + i + k + 4), acc1);
    }
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(g, acc0, _mm256_loadu_pd(out + i)));
    _mm256_storeu_pd(out + i + 4, _mm256_fmadd_pd(g, acc1, _mm256_loadu_pd(out + i + 4)));
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ntaps; ++k)
      acc = std::fma(taps[k], in[i + k], acc);
    out[i] = std::fma(gain, acc, out[i]);
  }
}

PS_AVX2 void cross_spectra(const cplx *x1, const cplx *x2, double *s11, double *s22,
                           cplx *s12, std::size_t n) {
  const __m256d flip_even = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(as_doubles(x1 + i));
    const __m256d b = _mm256_loadu_pd(as_doubles(x2 + i));
    // [|a0|^2, |b0|^2, |a1|^2, |b1|^2] -> [|a0|^2, |a1|^2, |b0|^2, |b1|^2]
    const __m256d pw = _mm256_permute4x64_pd(
        _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)), 0b11011000);
    _mm_storeu_pd(s11 + i, _mm256_castpd256_pd128(pw));
    _mm_storeu_pd(s22 + i, _mm256_extractf128_pd(pw, 1));
    // re = ar*br + ai*bi ; im = ai*br - ar*bi
    const __m256d t_re = _mm256_mul_pd(a, b);
    const __m256d b_sw = _mm256_mul_pd(_mm256_permute_pd(b, 0b0101), flip_even);
    const __m256d t_im = _mm256_mul_pd(a, b_sw);
    _mm256_storeu_pd(as_doubles(s12 + i), _mm256_hadd_pd(t_re, t_im));
  }
  for (; i < n; ++i) {
    const double ar = x1[i].real(), ai = x1[i].imag();
    const double br = x2[i].real(), bi = x2[i].imag();
    s11[i] = ar * ar + ai * ai;
    s22[i] = br * br + bi * bi;
    s12[i] = {ar * br + ai * bi, ai * br - ar * bi};
  }
}

PS_AVX2 void bilinear_form(const double *s11, const double *s22, const cplx *s12,
                           const cplx *w1, const cplx *w2, const cplx *v1,
                           const cplx *v2, cplx *c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a11 = dup_pairs(s11 + i);
    const __m256d a22 = dup_pairs(s22 + i);
    const __m256d a12 = _mm256_loadu_pd(as_doubles(s12 + i));
    const __m256d x1 = _mm256_loadu_pd(as_doubles(v1 + i));
    const __m256d x2 = _mm256_loadu_pd(as_doubles(v2 + i));
    const __m256d row1 = _mm256_add_pd(_mm256_mul_pd(a11, x1), cmul(a12, x2));
    const __m256d row2 = _mm256_add_pd(cmul(conj(a12), x1), _mm256_mul_pd(a22, x2));
    const __m256d y1 = conj(_mm256_loadu_pd(as_doubles(w1 + i)));
    const __m256d y2 = conj(_mm256_loadu_pd(as_doubles(w2 + i)));
    _mm256_storeu_pd(as_doubles(c + i), _mm256_add_pd(cmul(y1, row1), cmul(y2, row2)));
  }
  for (; i < n; ++i) {
    const cplx row1 = s11[i] * v1[i] + s12[i] * v2[i];
    const cplx row2 = std::conj(s12[i]) * v1[i] + s22[i] * v2[i];
    c[i] = std::conj(w1[i]) * row1 + std::conj(w2[i]) * row2;
  }
}

PS_AVX2 void whiten(cplx *c, const double *weight, double eps, std::size_t n) {
  const __m256d e = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d z = _mm256_loadu_pd(as_doubles(c + i));
    const __m256d sq = _mm256_mul_pd(z, z);
    const __m256d mag = _mm256_sqrt_pd(_mm256_hadd_pd(sq, sq));
    const __m256d f = _mm256_div_pd(dup_pairs(weight + i), _mm256_add_pd(mag, e));
    _mm256_storeu_pd(as_doubles(c + i), _mm256_mul_pd(z, f));
  }
  for (; i < n; ++i) {
    const double mag =
        std::sqrt(c[i].real() * c[i].real() + c[i].imag() * c[i].imag());
    c[i] *= weight[i] / (mag + eps);
  }
}

PS_AVX2 void magnitude(const cplx *z, double *out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(as_doubles(z + i));
    const __m256d b = _mm256_loadu_pd(as_doubles(z + i + 2));
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_permute4x64_pd(h, 0b11011000)));
  }
  for (; i < n; ++i)
    out[i] = std::sqrt(z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
}

#undef PS_AVX2

constexpr KernelTable kTable{
    Isa::avx2,     multiply, accumulate, fir_accumulate, cross_spectra,
    bilinear_form, whiten,   magnitude,
};

} // namespace

const KernelTable *avx2_table_if_compiled() { return &kTable; }

#else

const KernelTable *avx2_table_if_compiled() { return nullptr; }

#endif

} // namespace propsense::kernels::detail
