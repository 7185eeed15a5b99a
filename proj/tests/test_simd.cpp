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

#include <doctest.h>

#include <random>
#include <vector>

#include "ssflood/engine.hpp"
#include "ssflood/simd/kernels.hpp"

using namespace ssflood;
using ssflood::simd::cplx;

namespace {

std::vector<cplx> random_cplx(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1e-5);
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("dispatch") {
  IsaGuard guard;
  CHECK(simd::set_active_isa(simd::Isa::scalar));
  CHECK(simd::active_isa() == simd::Isa::scalar);
  CHECK(std::string(simd::active_kernels().name) == "scalar");
  CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
  CHECK(simd::set_active_isa(simd::Isa::avx2) == (simd::avx2_kernels() != nullptr));
}

TEST_CASE("AVX2 kernels match the scalar reference bit for bit") {
  const auto* avx = simd::avx2_kernels();
  if (!avx) {
    MESSAGE("AVX2 unavailable; skipped");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(12);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 10u, 33u, 180u, 961u}) {
    const auto in = random_cplx(rng, n);
    const cplx gain(0.3, -1.7);
    auto a = random_cplx(rng, n), b = a;
    ref.cmul_accumulate(a.data(), in.data(), n, gain);
    avx->cmul_accumulate(b.data(), in.data(), n, gain);
    CHECK(a == b);

    std::vector<double> ma(n), mb(n);
    ref.magnitude(in.data(), n, ma.data());
    avx->magnitude(in.data(), n, mb.data());
    CHECK(ma == mb);
    for (double th : {0.0, 5e-6, 1e-5, 1.0}) CHECK(ref.count_above(ma.data(), n, th) == avx->count_above(ma.data(), n, th));

    for (std::size_t taps : {1u, 5u, 31u}) {
      std::vector<double> h(taps);
      std::uniform_real_distribution<double> u(-1, 1);
      for (auto& x : h) x = u(rng);
      const auto x = random_cplx(rng, n + taps - 1);
      std::vector<cplx> fa(n), fb(n);
      ref.fir_real(x.data(), n, h.data(), taps, fa.data());
      avx->fir_real(x.data(), n, h.data(), taps, fb.data());
      CHECK(fa == fb);
    }
  }
}

TEST_CASE("whole trials are identical under both kernel sets") {
  if (!simd::avx2_kernels()) return;
  IsaGuard guard;
  SimConfig c;
  const auto t = build_grid(4, 4, 100.0);
  simd::set_active_isa(simd::Isa::scalar);
  const auto a = run_trials(t, 31, 4, c, 33);
  simd::set_active_isa(simd::Isa::avx2);
  const auto b = run_trials(t, 31, 4, c, 33);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(trace_to_json_line(a[i]) == trace_to_json_line(b[i]));
}
