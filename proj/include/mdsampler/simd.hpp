#pragma once

#include <cstddef>

// Small dense kernels behind the numeric hot paths (attention scores, matvec
// rows, norm moments). Each kernel has a scalar reference implementation and,
// where the platform provides it, a vectorized variant selected once at
// startup. Elementwise kernels (axpy, scale) are bit-identical across
// variants; reductions (dot, sum) may differ by reassociation rounding and
// are equivalence-tested against the scalar reference.

namespace mdsampler::simd {

enum class Isa { scalar, avx2, neon };

Isa active_isa();
const char* isa_name(Isa isa);

// Dispatched entry points.
double dot(const double* a, const double* b, size_t n);
float dot(const float* a, const float* b, size_t n);
double sum(const double* a, size_t n);
float sum(const float* a, size_t n);
double max(const double* a, size_t n);  // n >= 1
float max(const float* a, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);  // y += alpha * x
void axpy(float alpha, const float* x, float* y, size_t n);
void scale(double alpha, double* x, size_t n);  // x *= alpha
void scale(float alpha, float* x, size_t n);

// Reference kernels, always available.
namespace scalar {
double dot(const double* a, const double* b, size_t n);
float dot(const float* a, const float* b, size_t n);
double sum(const double* a, size_t n);
float sum(const float* a, size_t n);
double max(const double* a, size_t n);
float max(const float* a, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
void axpy(float alpha, const float* x, float* y, size_t n);
void scale(double alpha, double* x, size_t n);
void scale(float alpha, float* x, size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define MDSAMPLER_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, size_t n);
float dot(const float* a, const float* b, size_t n);
double sum(const double* a, size_t n);
float sum(const float* a, size_t n);
double max(const double* a, size_t n);
float max(const float* a, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
void axpy(float alpha, const float* x, float* y, size_t n);
void scale(double alpha, double* x, size_t n);
void scale(float alpha, float* x, size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define MDSAMPLER_HAVE_NEON_KERNELS 1
namespace neon {
double dot(const double* a, const double* b, size_t n);
float dot(const float* a, const float* b, size_t n);
double sum(const double* a, size_t n);
float sum(const float* a, size_t n);
double max(const double* a, size_t n);
float max(const float* a, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
void axpy(float alpha, const float* x, float* y, size_t n);
void scale(double alpha, double* x, size_t n);
void scale(float alpha, float* x, size_t n);
}  // namespace neon
#endif

}  // namespace mdsampler::simd
