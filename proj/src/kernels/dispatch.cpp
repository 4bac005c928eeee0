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

#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace propsense::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable &select() {
  const KernelTable *avx2 = table_for(Isa::avx2);
  if (const char *env = std::getenv("PROPSENSE_SIMD")) {
    const std::string want(env);
    if (want == "scalar")
      return detail::scalar_table();
    if (want == "avx2" && avx2 != nullptr)
      return *avx2;
  }
  return avx2 != nullptr ? *avx2 : detail::scalar_table();
}

} // namespace

const KernelTable *table_for(Isa isa) {
  switch (isa) {
  case Isa::scalar:
    return &detail::scalar_table();
  case Isa::avx2: {
    static const bool usable = cpu_has_avx2();
    return usable ? detail::avx2_table_if_compiled() : nullptr;
  }
  }
  return nullptr;
}

const KernelTable &active() {
  static const KernelTable &table = select();
  return table;
}

std::string_view name(Isa isa) noexcept {
  switch (isa) {
  case Isa::scalar:
    return "scalar";
  case Isa::avx2:
    return "avx2";
  }
  return "unknown";
}

} // namespace propsense::kernels
