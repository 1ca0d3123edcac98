#include <doctest.h>

#include <cmath>
#include <vector>

#include "mdsampler/common.hpp"
#include "mdsampler/simd.hpp"

using namespace mdsampler;

namespace {

template <typename T>
std::vector<T> random_vec(Rng& rng, size_t n, double scale = 2.0) {
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(scale * (2.0 * uniform01(rng) - 1.0));
    return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("dispatched reductions agree with the scalar reference") {
    Rng rng(101);
    for (size_t n : {size_t{1}, size_t{3}, size_t{4}, size_t{7}, size_t{8}, size_t{16}, size_t{33},
                     size_t{128}, size_t{1000}}) {
        const auto a = random_vec<double>(rng, n);
        const auto b = random_vec<double>(rng, n);
        const double ref_dot = simd::scalar::dot(a.data(), b.data(), n);
        const double got_dot = simd::dot(a.data(), b.data(), n);
        CHECK(std::abs(got_dot - ref_dot) <= 1e-12 * (1.0 + std::abs(ref_dot)) * n);
        const double ref_sum = simd::scalar::sum(a.data(), n);
        CHECK(std::abs(simd::sum(a.data(), n) - ref_sum) <= 1e-12 * (1.0 + std::abs(ref_sum)) * n);
        CHECK(simd::max(a.data(), n) == simd::scalar::max(a.data(), n));

        const auto af = random_vec<float>(rng, n);
        const auto bf = random_vec<float>(rng, n);
        const float ref_dot_f = simd::scalar::dot(af.data(), bf.data(), n);
        CHECK(std::abs(simd::dot(af.data(), bf.data(), n) - ref_dot_f) <=
              1e-4f * (1.0f + std::abs(ref_dot_f)));
        CHECK(simd::max(af.data(), n) == simd::scalar::max(af.data(), n));
    }
}

TEST_CASE("elementwise kernels are bit-identical to the scalar reference") {
    Rng rng(102);
    for (size_t n : {size_t{1}, size_t{5}, size_t{8}, size_t{13}, size_t{64}, size_t{257}}) {
        const auto x = random_vec<double>(rng, n);
        auto y1 = random_vec<double>(rng, n);
        auto y2 = y1;
        const double alpha = 2.0 * uniform01(rng) - 1.0;
        simd::axpy(alpha, x.data(), y1.data(), n);
        simd::scalar::axpy(alpha, x.data(), y2.data(), n);
        CHECK(y1 == y2);

        auto z1 = x;
        auto z2 = x;
        simd::scale(alpha, z1.data(), n);
        simd::scalar::scale(alpha, z2.data(), n);
        CHECK(z1 == z2);
    }
}

#ifdef MDSAMPLER_HAVE_AVX2_KERNELS
TEST_CASE("avx2 variant agrees with scalar when the cpu has it") {
    if (simd::active_isa() != simd::Isa::avx2) return;  // nothing to compare on this host
    Rng rng(103);
    for (size_t n : {size_t{2}, size_t{9}, size_t{31}, size_t{500}}) {
        const auto a = random_vec<double>(rng, n);
        const auto b = random_vec<double>(rng, n);
        const double ref = simd::scalar::dot(a.data(), b.data(), n);
        CHECK(std::abs(simd::avx2::dot(a.data(), b.data(), n) - ref) <=
              1e-12 * (1.0 + std::abs(ref)) * n);
        CHECK(simd::avx2::max(a.data(), n) == simd::scalar::max(a.data(), n));
        auto y1 = b;
        auto y2 = b;
        simd::avx2::axpy(0.75, a.data(), y1.data(), n);
        simd::scalar::axpy(0.75, a.data(), y2.data(), n);
        CHECK(y1 == y2);
    }
}
#endif

TEST_CASE("dispatch reports a valid isa") {
    const auto isa = simd::active_isa();
    CHECK((isa == simd::Isa::scalar || isa == simd::Isa::avx2 || isa == simd::Isa::neon));
    CHECK(simd::isa_name(isa) != nullptr);
}

}  // TEST_SUITE
