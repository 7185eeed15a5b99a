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

#include <cmath>

#include "ssflood/simd/kernels.hpp"

namespace ssflood::simd {

namespace {

void cmul_accumulate_scalar(cplx* out, const cplx* in, std::size_t n, cplx gain) {
  const double gr = gain.real();
  const double gi = gain.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = in[i].real();
    const double xi = in[i].imag();
    const double re = xr * gr - xi * gi;
    const double im = xi * gr + xr * gi;
    out[i] = cplx(out[i].real() + re, out[i].imag() + im);
  }
}

void fir_real_scalar(const cplx* in, std::size_t n_out, const double* taps, std::size_t n_taps,
                     cplx* out) {
  for (std::size_t i = 0; i < n_out; ++i) {
    const cplx* x = in + i + n_taps - 1;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < n_taps; ++k) {
      re = re + taps[k] * (x - k)->real();
      im = im + taps[k] * (x - k)->imag();
    }
    out[i] = cplx(re, im);
  }
}

void magnitude_scalar(const cplx* in, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = in[i].real();
    const double im = in[i].imag();
    out[i] = std::sqrt(re * re + im * im);
  }
}

std::size_t count_above_scalar(const double* in, std::size_t n, double threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += in[i] > threshold ? 1 : 0;
  return c;
}

constexpr KernelTable kScalar{
    "scalar", cmul_accumulate_scalar, fir_real_scalar, magnitude_scalar, count_above_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace ssflood::simd
