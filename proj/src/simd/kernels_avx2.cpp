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

// Compiled with -mavx2 and without -mfma: every product is rounded before it
// is added, matching the scalar reference bit for bit.

#include <immintrin.h>

#include <bit>
#include <cmath>

#include "ssflood/simd/kernels.hpp"

namespace ssflood::simd {

namespace {

inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

void cmul_accumulate_avx2(cplx* out, const cplx* in, std::size_t n, cplx gain) {
  const __m256d gr = _mm256_set1_pd(gain.real());
  const __m256d gi = _mm256_set1_pd(gain.imag());
  const double* src = as_doubles(in);
  double* dst = as_doubles(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(src + 2 * i);
    const __m256d t1 = _mm256_mul_pd(x, gr);
    const __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(x, 0b0101), gi);
    const __m256d prod = _mm256_addsub_pd(t1, t2);
    _mm256_storeu_pd(dst + 2 * i, _mm256_add_pd(_mm256_loadu_pd(dst + 2 * i), prod));
  }
  for (; i < n; ++i) {
    const double xr = in[i].real();
    const double xi = in[i].imag();
    const double re = xr * gain.real() - xi * gain.imag();
    const double im = xi * gain.real() + xr * gain.imag();
    out[i] = cplx(out[i].real() + re, out[i].imag() + im);
  }
}

void fir_real_avx2(const cplx* in, std::size_t n_out, const double* taps, std::size_t n_taps,
                   cplx* out) {
  const double* src = as_doubles(in);
  double* dst = as_doubles(out);
  std::size_t i = 0;
  // Four outputs per pass, two complex samples per register.
  for (; i + 4 <= n_out; i += 4) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    const double* x = src + 2 * (i + n_taps - 1);
    for (std::size_t k = 0; k < n_taps; ++k) {
      const __m256d t = _mm256_set1_pd(taps[k]);
      acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(t, _mm256_loadu_pd(x - 2 * k)));
      acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(t, _mm256_loadu_pd(x - 2 * k + 4)));
    }
    _mm256_storeu_pd(dst + 2 * i, acc0);
    _mm256_storeu_pd(dst + 2 * i + 4, acc1);
  }
  for (; i + 2 <= n_out; i += 2) {
    __m256d acc = _mm256_setzero_pd();
    const double* x = src + 2 * (i + n_taps - 1);
    for (std::size_t k = 0; k < n_taps; ++k)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(taps[k]), _mm256_loadu_pd(x - 2 * k)));
    _mm256_storeu_pd(dst + 2 * i, acc);
  }
  for (; i < n_out; ++i) {
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

void magnitude_avx2(const cplx* in, std::size_t n, double* out) {
  const double* src = as_doubles(in);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(src + 2 * i);
    const __m256d b = _mm256_loadu_pd(src + 2 * i + 4);
    // hadd -> [|s0|^2, |s2|^2, |s1|^2, |s3|^2]
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m256d ordered = _mm256_permute4x64_pd(h, 0b11011000);
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(ordered));
  }
  for (; i < n; ++i) {
    const double re = in[i].real();
    const double im = in[i].imag();
    out[i] = std::sqrt(re * re + im * im);
  }
}

std::size_t count_above_avx2(const double* in, std::size_t n, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(in + i), t, _CMP_GT_OQ));
    c += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) c += in[i] > threshold ? 1 : 0;
  return c;
}

constexpr KernelTable kAvx2{
    "avx2", cmul_accumulate_avx2, fir_real_avx2, magnitude_avx2, count_above_avx2,
};

}  // namespace

const KernelTable& avx2_kernel_table() { return kAvx2; }

}  // namespace ssflood::simd
