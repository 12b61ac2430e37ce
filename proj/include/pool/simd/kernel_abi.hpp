#pragma once

// Raw-pointer kernel signatures shared by every ISA backend. Kept free of
// standard library includes so the NEON translation unit can be checked with
// a freestanding cross compiler.

namespace pool::simd {

using size_type = decltype(sizeof(0));

struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double epsilon;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

// Accumulation order contract for dot(): 16 interleaved partial sums
// acc[k] += a[i + k] * b[i + k] over full blocks of 16, then
//   q[k] = (acc[k] + acc[k + 4]) + (acc[k + 8] + acc[k + 12]),  k = 0..3
//   sum  = (q[0] + q[1]) + (q[2] + q[3])
// and the remaining n % 16 products are added to sum in index order.
// Every backend must reproduce this order exactly.
using DotFn = double (*)(const double* a, const double* b, size_type n);

// y[i] += alpha * x[i]
using AxpyFn = void (*)(double alpha, const double* x, double* y, size_type n);

// y[i] = keep * y[i] + add * x[i]
using BlendFn = void (*)(double keep, double add, const double* x, double* y,
                         size_type n);

// y[i] *= s
using ScaleFn = void (*)(double s, double* y, size_type n);

// Adaptive-moment update with bias correction, elementwise:
//   m = b1 * m + (1 - b1) * g
//   v = b2 * v + (1 - b2) * (g * g)
//   p = p - lr * (m / bc1) / (sqrt(v / bc2) + eps)
using AdamFn = void (*)(const AdamCoefficients& c, double* p, const double* g,
                        double* m, double* v, size_type n);

namespace scalar {
double dot(const double* a, const double* b, size_type n);
void axpy(double alpha, const double* x, double* y, size_type n);
void blend(double keep, double add, const double* x, double* y, size_type n);
void scale(double s, double* y, size_type n);
void adam(const AdamCoefficients& c, double* p, const double* g, double* m,
          double* v, size_type n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, size_type n);
void axpy(double alpha, const double* x, double* y, size_type n);
void blend(double keep, double add, const double* x, double* y, size_type n);
void scale(double s, double* y, size_type n);
void adam(const AdamCoefficients& c, double* p, const double* g, double* m,
          double* v, size_type n);
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, size_type n);
void axpy(double alpha, const double* x, double* y, size_type n);
void blend(double keep, double add, const double* x, double* y, size_type n);
void scale(double s, double* y, size_type n);
void adam(const AdamCoefficients& c, double* p, const double* g, double* m,
          double* v, size_type n);
}  // namespace neon

}  // namespace pool::simd
