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

#pragma once

// Inner-loop kernels of the sample pipeline.
//
// Every kernel has a scalar reference and, on x86-64, an AVX2 variant picked
// at runtime. The variants evaluate the same operations in the same order
// without fused multiply-add, so their outputs are bit-identical; the
// equivalence tests assert exact equality.

#include <complex>
#include <cstddef>
#include <string_view>

namespace ssflood::simd {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;

  /// out[i] += gain * in[i] for i < n.
  void (*cmul_accumulate)(cplx* out, const cplx* in, std::size_t n, cplx gain);

  /// Real-tap FIR over complex data, "valid" mode:
  ///   out[i] = sum_{k < n_taps} taps[k] * in[i + n_taps - 1 - k],  i < n_out.
  /// `in` must hold n_out + n_taps - 1 samples. Taps are accumulated in
  /// increasing k.
  void (*fir_real)(const cplx* in, std::size_t n_out, const double* taps, std::size_t n_taps,
                   cplx* out);

  /// out[i] = sqrt(re^2 + im^2).
  void (*magnitude)(const cplx* in, std::size_t n, double* out);

  /// Number of i < n with in[i] > threshold.
  std::size_t (*count_above)(const double* in, std::size_t n, double threshold);
};

enum class Isa { scalar, avx2 };

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Table used by the simulator. Chosen once from CPU features; the
/// SSFLOOD_ISA environment variable ("scalar" or "avx2") overrides.
const KernelTable& active_kernels();
Isa active_isa();

/// Swap the active table (tests and benchmarks). Returns false when the
/// requested ISA is unavailable.
bool set_active_isa(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace ssflood::simd
