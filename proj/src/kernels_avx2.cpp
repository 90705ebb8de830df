// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma; nothing in it
// may run unless cpu_supports(Backend::avx2) returned true.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "bayesrl/kernels.hpp"

namespace bayesrl::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

// exp(x) for x >= kExpFlushBelow, 0 below. Cody-Waite reduction by ln2 and a
// degree-13 Taylor polynomial on |r| <= ln2/2; about 1 ulp.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo_clamp = _mm256_set1_pd(kExpFlushBelow);
  const __m256d hi_clamp = _mm256_set1_pd(709.0);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_clamp), hi_clamp);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), xc);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(n32), _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

  const __m256d flush = _mm256_cmp_pd(x, lo_clamp, _CMP_LT_OQ);
  return _mm256_blendv_pd(result, _mm256_setzero_pd(), flush);
}

void affine2(double* out, const double* base, const double* x, const double* y, double a,
             double b, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(base + i);
    acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), acc);
    acc = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) out[i] = base[i] + a * x[i] + b * y[i];
}

void outer_sum(double* out, const double* row, std::size_t nr, const double* col,
               std::size_t nc) {
  for (std::size_t i = 0; i < nr; ++i) {
    double* dst = out + i * nc;
    const __m256d r = _mm256_set1_pd(row[i]);
    std::size_t j = 0;
    for (; j + 4 <= nc; j += 4) _mm256_storeu_pd(dst + j, _mm256_add_pd(r, _mm256_loadu_pd(col + j)));
    for (; j < nc; ++j) dst[j] = row[i] + col[j];
  }
}

double max_value(const double* x, std::size_t n) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  __m256d m0 = _mm256_set1_pd(neg_inf);
  __m256d m1 = m0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    m0 = _mm256_max_pd(m0, _mm256_loadu_pd(x + i));
    m1 = _mm256_max_pd(m1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) m0 = _mm256_max_pd(m0, _mm256_loadu_pd(x + i));
  double m = hmax(_mm256_max_pd(m0, m1));
  for (; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

double exp_shift_sum(double* out, const double* in, double shift, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(in + i), vs));
    _mm256_storeu_pd(out + i, e);
    acc = _mm256_add_pd(acc, e);
  }
  double sum = hsum(acc);
  if (i < n) {
    // Tail goes through the same vector exp so results do not depend on position.
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t rem = n - i;
    for (std::size_t k = 0; k < rem; ++k) buf[k] = in[i + k] - shift;
    for (std::size_t k = rem; k < 4; ++k) buf[k] = -std::numeric_limits<double>::infinity();
    _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
    for (std::size_t k = 0; k < rem; ++k) {
      out[i + k] = buf[k];
      sum += buf[k];
    }
  }
  return sum;
}

void add_scalar(double* x, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), vc));
  for (; i < n; ++i) x[i] += c;
}

void scale(double* x, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vc));
  for (; i < n; ++i) x[i] *= c;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double hellinger_sq(const double* p, const double* q, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_sqrt_pd(_mm256_loadu_pd(p + i)),
                                    _mm256_sqrt_pd(_mm256_loadu_pd(q + i)));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return s;
}

void add_squared_diff(double* acc, const double* x, double q, std::size_t n) {
  const __m256d vq = _mm256_set1_pd(q);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vq);
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(d, d, _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) {
    const double d = x[i] - q;
    acc[i] += d * d;
  }
}

constexpr KernelTable kAvx2{
    Backend::avx2, affine2, outer_sum,   max_value,    exp_shift_sum,
    add_scalar,    scale,   dot,         hellinger_sq, add_squared_diff,
};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace bayesrl::kernels
