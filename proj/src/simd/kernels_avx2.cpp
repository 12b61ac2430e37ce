// Compiled with -mavx2 and without FMA so every product and sum rounds
// exactly like the scalar reference.
#include <immintrin.h>

#include "pool/simd/kernel_abi.hpp"

namespace pool::simd::avx2 {

double dot(const double* a, const double* b, size_type n) {
  __m256d r0 = _mm256_setzero_pd();
  __m256d r1 = _mm256_setzero_pd();
  __m256d r2 = _mm256_setzero_pd();
  __m256d r3 = _mm256_setzero_pd();
  size_type i = 0;
  for (; i + 16 <= n; i += 16) {
    r0 = _mm256_add_pd(r0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    r1 = _mm256_add_pd(r1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    r2 = _mm256_add_pd(r2, _mm256_mul_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8)));
    r3 = _mm256_add_pd(r3, _mm256_mul_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12)));
  }
  const __m256d q = _mm256_add_pd(_mm256_add_pd(r0, r1), _mm256_add_pd(r2, r3));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, q);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, size_type n) {
  const __m256d va = _mm256_set1_pd(alpha);
  size_type i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void blend(double keep, double add, const double* x, double* y, size_type n) {
  const __m256d vk = _mm256_set1_pd(keep);
  const __m256d va = _mm256_set1_pd(add);
  size_type i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d kept = _mm256_mul_pd(vk, _mm256_loadu_pd(y + i));
    const __m256d added = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(kept, added));
  }
  for (; i < n; ++i) y[i] = keep * y[i] + add * x[i];
}

void scale(double s, double* y, size_type n) {
  const __m256d vs = _mm256_set1_pd(s);
  size_type i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), vs));
  }
  for (; i < n; ++i) y[i] *= s;
}

void adam(const AdamCoefficients& c, double* p, const double* g, double* m,
          double* v, size_type n) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d nb1 = _mm256_set1_pd(one_minus_b1);
  const __m256d nb2 = _mm256_set1_pd(one_minus_b2);
  const __m256d bc1 = _mm256_set1_pd(c.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(c.bias_correction2);
  const __m256d lr = _mm256_set1_pd(c.lr);
  const __m256d eps = _mm256_set1_pd(c.epsilon);
  size_type i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d vm = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(nb1, vg));
    const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(nb2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d m_hat = _mm256_div_pd(vm, bc1);
    const __m256d v_hat = _mm256_div_pd(vv, bc2);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = c.beta1 * m[i] + one_minus_b1 * g[i];
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g[i] * g[i]);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    p[i] = p[i] - c.lr * m_hat / (__builtin_sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace pool::simd::avx2
