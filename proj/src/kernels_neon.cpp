#include "kernel_rows.hpp"

#if defined(__aarch64__)

#include "refrain/align.hpp"

#include <arm_neon.h>

namespace refrain::detail {

namespace {

inline float64x2_t bounded_step_f64(float64x2_t g, uint64x2_t mask, float64x2_t bound) {
    const float64x2_t ones = vdupq_n_f64(1.0);
    const float64x2_t half = vdupq_n_f64(0.5);
    const float64x2_t matched = vaddq_f64(g, vsubq_f64(ones, vdivq_f64(g, bound)));
    const uint64x2_t gt1 = vcgtq_f64(g, ones);
    const float64x2_t mismatched = vbslq_f64(gt1, vsubq_f64(g, ones), vmulq_f64(g, half));
    return vbslq_f64(mask, matched, mismatched);
}

} // namespace

void gain_row_bounded_neon(const float* prev, const std::uint8_t* match, float* out,
                           int cols, double bound) {
    const float64x2_t bvec = vdupq_n_f64(bound);

    int j = 0;
    if (cols > 0) {
        out[0] = static_cast<float>(bounded_update(prev[0], match[0] ? +1 : -1, bound));
        j = 1;
    }

    for (; j + 4 <= cols; j += 4) {
        const float32x4_t vert = vld1q_f32(prev + j);
        const float32x4_t diag = vld1q_f32(prev + j - 1);
        const float32x4_t pred = vmaxq_f32(vert, diag);

        // Widen the four match bytes to 32-bit lane masks.
        const std::uint32_t m32[4] = {
            match[j] ? ~0u : 0u, match[j + 1] ? ~0u : 0u,
            match[j + 2] ? ~0u : 0u, match[j + 3] ? ~0u : 0u};
        const uint32x4_t mask32 = vld1q_u32(m32);

        const float64x2_t g_lo = vcvt_f64_f32(vget_low_f32(pred));
        const float64x2_t g_hi = vcvt_f64_f32(vget_high_f32(pred));
        const uint64x2_t mask_lo = vmovl_u32(vget_low_u32(mask32));
        const uint64x2_t mask_hi = vmovl_u32(vget_high_u32(mask32));
        // vmovl zero-extends; turn 0x00000000FFFFFFFF into all-ones lanes.
        const uint64x2_t full_lo = vceqq_u64(mask_lo, vdupq_n_u64(0xffffffffull));
        const uint64x2_t full_hi = vceqq_u64(mask_hi, vdupq_n_u64(0xffffffffull));

        const float32x2_t r_lo = vcvt_f32_f64(bounded_step_f64(g_lo, full_lo, bvec));
        const float32x2_t r_hi = vcvt_f32_f64(bounded_step_f64(g_hi, full_hi, bvec));
        vst1q_f32(out + j, vcombine_f32(r_lo, r_hi));
    }

    for (; j < cols; ++j) {
        float pred = prev[j];
        if (prev[j - 1] > pred)
            pred = prev[j - 1];
        out[j] = static_cast<float>(bounded_update(pred, match[j] ? +1 : -1, bound));
    }
}

void gain_row_unbounded_neon(const float* prev, const std::uint8_t* match, float* out,
                             int cols, double /*bound*/) {
    const float32x4_t ones = vdupq_n_f32(1.0f);
    const float32x4_t minus_ones = vdupq_n_f32(-1.0f);
    const float32x4_t zero = vdupq_n_f32(0.0f);

    int j = 0;
    if (cols > 0) {
        const float g = prev[0] + (match[0] ? 1.0f : -1.0f);
        out[0] = g < 0.0f ? 0.0f : g;
        j = 1;
    }

    for (; j + 4 <= cols; j += 4) {
        const float32x4_t vert = vld1q_f32(prev + j);
        const float32x4_t diag = vld1q_f32(prev + j - 1);
        const float32x4_t pred = vmaxq_f32(vert, diag);

        const std::uint32_t m32[4] = {
            match[j] ? ~0u : 0u, match[j + 1] ? ~0u : 0u,
            match[j + 2] ? ~0u : 0u, match[j + 3] ? ~0u : 0u};
        const uint32x4_t mask = vld1q_u32(m32);

        const float32x4_t step = vbslq_f32(mask, ones, minus_ones);
        const float32x4_t g = vaddq_f32(pred, step);
        vst1q_f32(out + j, vmaxq_f32(g, zero));
    }

    for (; j < cols; ++j) {
        float pred = prev[j];
        if (prev[j - 1] > pred)
            pred = prev[j - 1];
        const float g = pred + (match[j] ? 1.0f : -1.0f);
        out[j] = g < 0.0f ? 0.0f : g;
    }
}

} // namespace refrain::detail

#endif // __aarch64__
