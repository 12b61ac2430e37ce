// AArch64 backend. Two-lane registers are paired so the 16 partial sums of
// dot() land in the same order as the scalar reference.
#include <arm_neon.h>

#include "pool/simd/kernel_abi.hpp"

namespace pool::simd::neon {

double dot(const double* a, const double* b, size_type n) {
  float64x2_t v[8];
  for (int k = 0; k < 8; ++k) v[k] = vdupq_n_f64(0.0);
  size_type i = 0;
  for (; i + 16 <= n; i += 16) {
    for (int k = 0; k < 8; ++k) {
      v[k] = vaddq_f64(v[k], vmulq_f64(vld1q_f64(a + i + 2 * k), vld1q_f64(b + i + 2 * k)));
    }
  }
  // lanes 0,1 and lanes 2,3 of the four-lane reduction
  const float64x2_t lo = vaddq_f64(vaddq_f64(v[0], v[2]), vaddq_f64(v[4], v[6]));
  const float64x2_t hi = vaddq_f64(vaddq_f64(v[1], v[3]), vaddq_f64(v[5], v[7]));
  double sum = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
               (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, size_type n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  size_type i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void blend(double keep, double add, const double* x, double* y, size_type n) {
  const float64x2_t vk = vdupq_n_f64(keep);
  const float64x2_t va = vdupq_n_f64(add);
  size_type i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vmulq_f64(vk, vld1q_f64(y + i)), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = keep * y[i] + add * x[i];
}

void scale(double s, double* y, size_type n) {
  const float64x2_t vs = vdupq_n_f64(s);
  size_type i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(vld1q_f64(y + i), vs));
  for (; i < n; ++i) y[i] *= s;
}

void adam(const AdamCoefficients& c, double* p, const double* g, double* m,
          double* v, size_type n) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t nb1 = vdupq_n_f64(one_minus_b1);
  const float64x2_t nb2 = vdupq_n_f64(one_minus_b2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(c.lr);
  const float64x2_t eps = vdupq_n_f64(c.epsilon);
  size_type i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vg = vld1q_f64(g + i);
    const float64x2_t vm = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(nb1, vg));
    const float64x2_t vv = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(nb2, vmulq_f64(vg, vg)));
    vst1q_f64(m + i, vm);
    vst1q_f64(v + i, vv);
    const float64x2_t m_hat = vdivq_f64(vm, bc1);
    const float64x2_t v_hat = vdivq_f64(vv, bc2);
    const float64x2_t step = vdivq_f64(vmulq_f64(lr, m_hat), vaddq_f64(vsqrtq_f64(v_hat), eps));
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = c.beta1 * m[i] + one_minus_b1 * g[i];
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g[i] * g[i]);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    p[i] = p[i] - c.lr * m_hat / (__builtin_sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace pool::simd::neon
