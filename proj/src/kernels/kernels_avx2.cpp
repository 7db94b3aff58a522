// AVX2 kernel variants. Compiled with -mavx2; selected at runtime only when
// the CPU reports AVX2. Tail elements fall through to the scalar loop, which
// performs the identical per-element operations.
#include <immintrin.h>

#include "resparc/kernels.hpp"

namespace resparc::kernels {

namespace {

void add_row_i32_avx2(int32_t* acc, const int16_t* row, size_t n)
{
    size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        __m128i lev16 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(row + j));
        __m256i lev32 = _mm256_cvtepi16_epi32(lev16);
        __m256i a = _mm256_loadu_si256(reinterpret_cast<__m256i*>(acc + j));
        a = _mm256_add_epi32(a, lev32);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + j), a);
    }
    for (; j < n; ++j)
        acc[j] += static_cast<int32_t>(row[j]);
}

void add_row_f64_avx2(double* acc, const double* row, size_t n)
{
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d a = _mm256_loadu_pd(acc + j);
        __m256d r = _mm256_loadu_pd(row + j);
        _mm256_storeu_pd(acc + j, _mm256_add_pd(a, r));
    }
    for (; j < n; ++j)
        acc[j] += row[j];
}

void if_update_avx2(double* potential, const double* current, double threshold,
                    uint8_t* spike, size_t n)
{
    const __m256d thr = _mm256_set1_pd(threshold);
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d p = _mm256_add_pd(_mm256_loadu_pd(potential + j),
                                  _mm256_loadu_pd(current + j));
        __m256d ge = _mm256_cmp_pd(p, thr, _CMP_GE_OQ);
        // Subtract the threshold only on spiking lanes.
        __m256d sub = _mm256_and_pd(ge, thr);
        _mm256_storeu_pd(potential + j, _mm256_sub_pd(p, sub));
        int mask = _mm256_movemask_pd(ge);
        spike[j + 0] = (mask >> 0) & 1;
        spike[j + 1] = (mask >> 1) & 1;
        spike[j + 2] = (mask >> 2) & 1;
        spike[j + 3] = (mask >> 3) & 1;
    }
    for (; j < n; ++j) {
        double p = potential[j] + current[j];
        uint8_t s = p >= threshold ? 1 : 0;
        potential[j] = s ? p - threshold : p;
        spike[j] = s;
    }
}

bool all_zero_u64_avx2(const uint64_t* words, size_t n)
{
    __m256i any = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        any = _mm256_or_si256(any, _mm256_loadu_si256(
                                       reinterpret_cast<const __m256i*>(words + i)));
    uint64_t tail = 0;
    for (; i < n; ++i)
        tail |= words[i];
    return _mm256_testz_si256(any, any) && tail == 0;
}

constexpr Ops kAvx2Ops = {
    &add_row_i32_avx2,
    &add_row_f64_avx2,
    &if_update_avx2,
    &all_zero_u64_avx2,
};

} // namespace

bool avx2_supported()
{
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Ops& avx2_ops()
{
    return kAvx2Ops;
}

} // namespace resparc::kernels
