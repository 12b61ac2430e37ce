#include <cmath>

#include "pool/simd/kernel_abi.hpp"

namespace pool::simd::scalar {

double dot(const double* a, const double* b, size_type n) {
  double acc[16] = {};
  size_type i = 0;
  for (; i + 16 <= n; i += 16) {
    for (size_type k = 0; k < 16; ++k) acc[k] += a[i + k] * b[i + k];
  }
  double q[4];
  for (size_type k = 0; k < 4; ++k) {
    q[k] = (acc[k] + acc[k + 4]) + (acc[k + 8] + acc[k + 12]);
  }
  double sum = (q[0] + q[1]) + (q[2] + q[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, size_type n) {
  for (size_type i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void blend(double keep, double add, const double* x, double* y, size_type n) {
  for (size_type i = 0; i < n; ++i) y[i] = keep * y[i] + add * x[i];
}

void scale(double s, double* y, size_type n) {
  for (size_type i = 0; i < n; ++i) y[i] *= s;
}

void adam(const AdamCoefficients& c, double* p, const double* g, double* m,
          double* v, size_type n) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (size_type i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + one_minus_b1 * g[i];
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g[i] * g[i]);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    p[i] = p[i] - c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace pool::simd::scalar
