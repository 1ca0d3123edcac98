#include "mdsampler/simd.hpp"

namespace mdsampler::simd {

namespace {

struct KernelTable {
    Isa isa;
    double (*dot_d)(const double*, const double*, size_t);
    float (*dot_f)(const float*, const float*, size_t);
    double (*sum_d)(const double*, size_t);
    float (*sum_f)(const float*, size_t);
    double (*max_d)(const double*, size_t);
    float (*max_f)(const float*, size_t);
    void (*axpy_d)(double, const double*, double*, size_t);
    void (*axpy_f)(float, const float*, float*, size_t);
    void (*scale_d)(double, double*, size_t);
    void (*scale_f)(float, float*, size_t);
};

constexpr KernelTable kScalarTable = {
    Isa::scalar,    scalar::dot, scalar::dot,  scalar::sum,   scalar::sum,
    scalar::max,    scalar::max, scalar::axpy, scalar::axpy,  scalar::scale,
    scalar::scale,
};

KernelTable select_table() {
#ifdef MDSAMPLER_HAVE_AVX2_KERNELS
    if (__builtin_cpu_supports("avx2")) {
        return {Isa::avx2,  avx2::dot, avx2::dot,  avx2::sum,  avx2::sum,
                avx2::max,  avx2::max, avx2::axpy, avx2::axpy, avx2::scale,
                avx2::scale};
    }
#endif
#ifdef MDSAMPLER_HAVE_NEON_KERNELS
    return {Isa::neon,  neon::dot, neon::dot,  neon::sum,  neon::sum,
            neon::max,  neon::max, neon::axpy, neon::axpy, neon::scale,
            neon::scale};
#endif
    return kScalarTable;
}

const KernelTable& table() {
    static const KernelTable t = select_table();
    return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

double dot(const double* a, const double* b, size_t n) { return table().dot_d(a, b, n); }
float dot(const float* a, const float* b, size_t n) { return table().dot_f(a, b, n); }
double sum(const double* a, size_t n) { return table().sum_d(a, n); }
float sum(const float* a, size_t n) { return table().sum_f(a, n); }
double max(const double* a, size_t n) { return table().max_d(a, n); }
float max(const float* a, size_t n) { return table().max_f(a, n); }
void axpy(double alpha, const double* x, double* y, size_t n) { table().axpy_d(alpha, x, y, n); }
void axpy(float alpha, const float* x, float* y, size_t n) { table().axpy_f(alpha, x, y, n); }
void scale(double alpha, double* x, size_t n) { table().scale_d(alpha, x, n); }
void scale(float alpha, float* x, size_t n) { table().scale_f(alpha, x, n); }

}  // namespace mdsampler::simd
