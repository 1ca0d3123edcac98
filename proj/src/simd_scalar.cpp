#include "mdsampler/simd.hpp"

namespace mdsampler::simd::scalar {

namespace {

template <typename T>
T dot_impl(const T* a, const T* b, size_t n) {
    T acc = T(0);
    for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
T sum_impl(const T* a, size_t n) {
    T acc = T(0);
    for (size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

template <typename T>
T max_impl(const T* a, size_t n) {
    T m = a[0];
    for (size_t i = 1; i < n; ++i) m = a[i] > m ? a[i] : m;
    return m;
}

template <typename T>
void axpy_impl(T alpha, const T* x, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void scale_impl(T alpha, T* x, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] *= alpha;
}

}  // namespace

double dot(const double* a, const double* b, size_t n) { return dot_impl(a, b, n); }
float dot(const float* a, const float* b, size_t n) { return dot_impl(a, b, n); }
double sum(const double* a, size_t n) { return sum_impl(a, n); }
float sum(const float* a, size_t n) { return sum_impl(a, n); }
double max(const double* a, size_t n) { return max_impl(a, n); }
float max(const float* a, size_t n) { return max_impl(a, n); }
void axpy(double alpha, const double* x, double* y, size_t n) { axpy_impl(alpha, x, y, n); }
void axpy(float alpha, const float* x, float* y, size_t n) { axpy_impl(alpha, x, y, n); }
void scale(double alpha, double* x, size_t n) { scale_impl(alpha, x, n); }
void scale(float alpha, float* x, size_t n) { scale_impl(alpha, x, n); }

}  // namespace mdsampler::simd::scalar
