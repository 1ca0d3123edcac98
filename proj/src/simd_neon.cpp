// NEON kernel variants for aarch64. Same contract as the AVX2 file:
// separate multiply and add, reductions equivalence-tested against scalar.

#include "mdsampler/simd.hpp"

#ifdef MDSAMPLER_HAVE_NEON_KERNELS

#include <arm_neon.h>

namespace mdsampler::simd::neon {

double dot(const double* a, const double* b, size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return vaddvq_f64(acc) + tail;
}

float dot(const float* a, const float* b, size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = vaddq_f32(acc, vmulq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
    }
    float tail = 0.0f;
    for (; i < n; ++i) tail += a[i] * b[i];
    return vaddvq_f32(acc) + tail;
}

double sum(const double* a, size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i];
    return vaddvq_f64(acc) + tail;
}

float sum(const float* a, size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = vaddq_f32(acc, vld1q_f32(a + i));
    float tail = 0.0f;
    for (; i < n; ++i) tail += a[i];
    return vaddvq_f32(acc) + tail;
}

double max(const double* a, size_t n) {
    if (n < 2) return scalar::max(a, n);
    float64x2_t m = vld1q_f64(a);
    size_t i = 2;
    for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vld1q_f64(a + i));
    double r = vmaxvq_f64(m);
    for (; i < n; ++i) r = a[i] > r ? a[i] : r;
    return r;
}

float max(const float* a, size_t n) {
    if (n < 4) return scalar::max(a, n);
    float32x4_t m = vld1q_f32(a);
    size_t i = 4;
    for (; i + 4 <= n; i += 4) m = vmaxq_f32(m, vld1q_f32(a + i));
    float r = vmaxvq_f32(m);
    for (; i < n; ++i) r = a[i] > r ? a[i] : r;
    return r;
}

void axpy(double alpha, const double* x, double* y, size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy(float alpha, const float* x, float* y, size_t n) {
    const float32x4_t va = vdupq_n_f32(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t vy = vld1q_f32(y + i);
        vy = vaddq_f32(vy, vmulq_f32(va, vld1q_f32(x + i)));
        vst1q_f32(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void scale(float alpha, float* x, size_t n) {
    const float32x4_t va = vdupq_n_f32(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) vst1q_f32(x + i, vmulq_f32(va, vld1q_f32(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

}  // namespace mdsampler::simd::neon

#endif  // MDSAMPLER_HAVE_NEON_KERNELS
