// NEON kernel variants (aarch64). Same per-element operation sequences as the
// scalar kernels, so results are bit-identical.
#include <arm_neon.h>

#include "resparc/kernels.hpp"

namespace resparc::kernels {

namespace {

void add_row_i32_neon(int32_t* acc, const int16_t* row, size_t n)
{
    size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        int16x8_t lev = vld1q_s16(row + j);
        int32x4_t lo = vmovl_s16(vget_low_s16(lev));
        int32x4_t hi = vmovl_s16(vget_high_s16(lev));
        vst1q_s32(acc + j, vaddq_s32(vld1q_s32(acc + j), lo));
        vst1q_s32(acc + j + 4, vaddq_s32(vld1q_s32(acc + j + 4), hi));
    }
    for (; j < n; ++j)
        acc[j] += static_cast<int32_t>(row[j]);
}

void add_row_f64_neon(double* acc, const double* row, size_t n)
{
    size_t j = 0;
    for (; j + 2 <= n; j += 2)
        vst1q_f64(acc + j, vaddq_f64(vld1q_f64(acc + j), vld1q_f64(row + j)));
    for (; j < n; ++j)
        acc[j] += row[j];
}

void if_update_neon(double* potential, const double* current, double threshold,
                    uint8_t* spike, size_t n)
{
    const float64x2_t thr = vdupq_n_f64(threshold);
    size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        float64x2_t p = vaddq_f64(vld1q_f64(potential + j), vld1q_f64(current + j));
        uint64x2_t ge = vcgeq_f64(p, thr);
        float64x2_t sub = vreinterpretq_f64_u64(
            vandq_u64(ge, vreinterpretq_u64_f64(thr)));
        vst1q_f64(potential + j, vsubq_f64(p, sub));
        spike[j + 0] = static_cast<uint8_t>(vgetq_lane_u64(ge, 0) & 1);
        spike[j + 1] = static_cast<uint8_t>(vgetq_lane_u64(ge, 1) & 1);
    }
    for (; j < n; ++j) {
        double p = potential[j] + current[j];
        uint8_t s = p >= threshold ? 1 : 0;
        potential[j] = s ? p - threshold : p;
        spike[j] = s;
    }
}

bool all_zero_u64_neon(const uint64_t* words, size_t n)
{
    uint64x2_t any = vdupq_n_u64(0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2)
        any = vorrq_u64(any, vld1q_u64(words + i));
    uint64_t rest = vgetq_lane_u64(any, 0) | vgetq_lane_u64(any, 1);
    for (; i < n; ++i)
        rest |= words[i];
    return rest == 0;
}

constexpr Ops kNeonOps = {
    &add_row_i32_neon,
    &add_row_f64_neon,
    &if_update_neon,
    &all_zero_u64_neon,
};

} // namespace

const Ops& neon_ops()
{
    return kNeonOps;
}

} // namespace resparc::kernels
