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

// Thin wrapper over FFTW3. Plans are created once per (kind, size), cached for
// the life of the process, and executed through the new-array interface, which
// is safe to call concurrently.

#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace propsense::fft {

using cplx = std::complex<double>;

// Unnormalized forward real transform; out.size() must be in.size() / 2 + 1.
void forward_real(std::span<const double> in, std::span<cplx> out);

// Inverse of forward_real scaled by 1/N, N = out.size(); in.size() must be
// N / 2 + 1. The imaginary parts of the DC and Nyquist bins are ignored.
void inverse_real(std::span<const cplx> in, std::span<double> out);

// Inverse complex transform scaled by 1/N.
void inverse_complex(std::span<const cplx> in, std::span<cplx> out);

} // namespace propsense::fft
