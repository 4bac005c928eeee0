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

#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "propsense/error.hpp"

namespace propsense::fft {
namespace {

enum class Kind { r2c, c2r, c2c_backward };

class PlanCache {
public:
  ~PlanCache() {
    for (auto &[key, plan] : plans_)
      fftw_destroy_plan(plan);
  }

  fftw_plan get(Kind kind, int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find({kind, n});
    if (it != plans_.end())
      return it->second;
    fftw_plan plan = make(kind, n);
    if (plan == nullptr)
      throw ConfigError("fftw could not create a plan of size " + std::to_string(n));
    plans_.emplace(std::make_pair(kind, n), plan);
    return plan;
  }

private:
  static fftw_plan make(Kind kind, int n) {
    constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    double *real = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex *a = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_complex *b = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = nullptr;
    switch (kind) {
    case Kind::r2c:
      plan = fftw_plan_dft_r2c_1d(n, real, a, flags);
      break;
    case Kind::c2r:
      plan = fftw_plan_dft_c2r_1d(n, a, real, flags);
      break;
    case Kind::c2c_backward:
      plan = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
      break;
    }
    fftw_free(b);
    fftw_free(a);
    fftw_free(real);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<Kind, int>, fftw_plan> plans_;
};

PlanCache &cache() {
  static PlanCache instance;
  return instance;
}

fftw_complex *as_fftw(cplx *p) { return reinterpret_cast<fftw_complex *>(p); }

} // namespace

void forward_real(std::span<const double> in, std::span<cplx> out) {
  if (in.empty() || out.size() != in.size() / 2 + 1)
    throw ConfigError("forward_real: output must hold N/2+1 bins");
  fftw_plan plan = cache().get(Kind::r2c, static_cast<int>(in.size()));
  // Out-of-place r2c preserves its input.
  fftw_execute_dft_r2c(plan, const_cast<double *>(in.data()), as_fftw(out.data()));
}

void inverse_real(std::span<const cplx> in, std::span<double> out) {
  if (out.empty() || in.size() != out.size() / 2 + 1)
    throw ConfigError("inverse_real: input must hold N/2+1 bins");
  fftw_plan plan = cache().get(Kind::c2r, static_cast<int>(out.size()));
  std::vector<cplx> scratch(in.begin(), in.end()); // c2r destroys its input
  fftw_execute_dft_c2r(plan, as_fftw(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(out.size());
  for (double &v : out)
    v *= scale;
}

void inverse_complex(std::span<const cplx> in, std::span<cplx> out) {
  if (in.empty() || in.size() != out.size())
    throw ConfigError("inverse_complex: size mismatch");
  fftw_plan plan = cache().get(Kind::c2c_backward, static_cast<int>(in.size()));
  std::vector<cplx> scratch(in.begin(), in.end());
  fftw_execute_dft(plan, as_fftw(scratch.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(out.size());
  for (cplx &v : out)
    v *= scale;
}

} // namespace propsense::fft
