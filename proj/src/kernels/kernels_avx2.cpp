#include "flda/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define FLDA_HAVE_AVX2_KERNELS 1
#include <immintrin.h>
#else
#define FLDA_HAVE_AVX2_KERNELS 0
#endif

namespace flda::kernels {

#if FLDA_HAVE_AVX2_KERNELS
namespace {

#define FLDA_AVX2 __attribute__((target("avx2")))

FLDA_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t blocked = n - n % kLanes;
  for (std::size_t j = 0; j < blocked; j += kLanes) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j));
    acc = _mm256_add_pd(acc, prod);
  }
  alignas(32) double lane[kLanes];
  _mm256_store_pd(lane, acc);
  for (std::size_t j = blocked; j < n; ++j) {
    lane[j - blocked] += x[j] * y[j];
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

FLDA_AVX2 double weighted_square_avx2(const double* v, const double* w, const double* x,
                                      std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t blocked = n - n % kLanes;
  for (std::size_t j = 0; j < blocked; j += kLanes) {
    const __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(w + j), _mm256_loadu_pd(x + j));
    const __m256d term = _mm256_mul_pd(_mm256_loadu_pd(v + j), _mm256_mul_pd(wx, wx));
    acc = _mm256_add_pd(acc, term);
  }
  alignas(32) double lane[kLanes];
  _mm256_store_pd(lane, acc);
  for (std::size_t j = blocked; j < n; ++j) {
    const double wx = w[j] * x[j];
    lane[j - blocked] += v[j] * (wx * wx);
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

FLDA_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  const std::size_t blocked = n - n % kLanes;
  for (std::size_t j = 0; j < blocked; j += kLanes) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + j));
    _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(y + j), prod));
  }
  for (std::size_t j = blocked; j < n; ++j) {
    y[j] += alpha * x[j];
  }
}

FLDA_AVX2 void score_update_avx2(double c1, double c2, const double* x, const double* v,
                                 const double* w, double* g, std::size_t n) {
  const __m256d k1 = _mm256_set1_pd(c1);
  const __m256d k2 = _mm256_set1_pd(c2);
  const std::size_t blocked = n - n % kLanes;
  for (std::size_t j = 0; j < blocked; j += kLanes) {
    const __m256d xj = _mm256_loadu_pd(x + j);
    const __m256d lin = _mm256_mul_pd(k1, xj);
    __m256d quad = _mm256_mul_pd(k2, _mm256_loadu_pd(v + j));
    quad = _mm256_mul_pd(quad, _mm256_loadu_pd(w + j));
    quad = _mm256_mul_pd(quad, xj);
    quad = _mm256_mul_pd(quad, xj);
    _mm256_storeu_pd(g + j, _mm256_add_pd(_mm256_loadu_pd(g + j), _mm256_add_pd(lin, quad)));
  }
  for (std::size_t j = blocked; j < n; ++j) {
    const double lin = c1 * x[j];
    const double quad = (((c2 * v[j]) * w[j]) * x[j]) * x[j];
    g[j] += lin + quad;
  }
}

FLDA_AVX2 void rank1_upper_avx2(const double* x, double* gram, std::size_t n) {
  for (std::size_t r = 0; r < n; ++r) {
    const double xr = x[r];
    if (xr == 0.0) {
      continue;
    }
    double* row = gram + r * n;
    const __m256d s = _mm256_set1_pd(xr);
    std::size_t c = r;
    for (; c + kLanes <= n; c += kLanes) {
      const __m256d prod = _mm256_mul_pd(s, _mm256_loadu_pd(x + c));
      _mm256_storeu_pd(row + c, _mm256_add_pd(_mm256_loadu_pd(row + c), prod));
    }
    for (; c < n; ++c) {
      row[c] += xr * x[c];
    }
  }
}

FLDA_AVX2 void count_nonzero_avx2(const double* x, std::int64_t* counts, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t blocked = n - n % kLanes;
  for (std::size_t j = 0; j < blocked; j += kLanes) {
    // all-ones lanes read as -1 when reinterpreted as int64
    const __m256i mask =
        _mm256_castpd_si256(_mm256_cmp_pd(_mm256_loadu_pd(x + j), zero, _CMP_NEQ_UQ));
    auto* dst = reinterpret_cast<__m256i*>(counts + j);
    _mm256_storeu_si256(dst, _mm256_sub_epi64(_mm256_loadu_si256(dst), mask));
  }
  for (std::size_t j = blocked; j < n; ++j) {
    counts[j] += (x[j] != 0.0) ? 1 : 0;
  }
}

#undef FLDA_AVX2

constexpr KernelTable kAvx2{
    Backend::avx2,      "avx2",           &dot_avx2,         &weighted_square_avx2,
    &axpy_avx2,         &score_update_avx2, &rank1_upper_avx2, &count_nonzero_avx2,
};

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2_table() noexcept { return nullptr; }

#endif

}  // namespace flda::kernels
