#include "kernel_rows.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include "refrain/align.hpp"

#include <immintrin.h>

namespace refrain::detail {

namespace {

// 4 lanes of the bounded update in double precision. mask64 is all-ones
// where the row pitch matched the onset.
inline __m256d bounded_step_pd(__m256d g, __m256d mask64, __m256d bound) {
    const __m256d ones = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d matched = _mm256_add_pd(g, _mm256_sub_pd(ones, _mm256_div_pd(g, bound)));
    const __m256d gt1 = _mm256_cmp_pd(g, ones, _CMP_GT_OQ);
    const __m256d mismatched =
        _mm256_blendv_pd(_mm256_mul_pd(g, half), _mm256_sub_pd(g, ones), gt1);
    return _mm256_blendv_pd(mismatched, matched, mask64);
}

} // namespace

void gain_row_bounded_avx2(const float* prev, const std::uint8_t* match, float* out,
                           int cols, double bound) {
    const __m256d bvec = _mm256_set1_pd(bound);

    // Column 0 has no diagonal predecessor.
    int j = 0;
    if (cols > 0) {
        out[0] = static_cast<float>(bounded_update(prev[0], match[0] ? +1 : -1, bound));
        j = 1;
    }

    for (; j + 8 <= cols; j += 8) {
        const __m256 vert = _mm256_loadu_ps(prev + j);
        const __m256 diag = _mm256_loadu_ps(prev + j - 1);
        const __m256 pred = _mm256_max_ps(vert, diag);

        const __m128i flags8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(match + j));
        const __m256i flags32 = _mm256_cvtepi8_epi32(flags8);
        const __m256i mask32 = _mm256_cmpgt_epi32(flags32, _mm256_setzero_si256());

        const __m256d g_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(pred));
        const __m256d g_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(pred, 1));
        const __m256d mask_lo =
            _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm256_castsi256_si128(mask32)));
        const __m256d mask_hi =
            _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm256_extracti128_si256(mask32, 1)));

        const __m128 r_lo = _mm256_cvtpd_ps(bounded_step_pd(g_lo, mask_lo, bvec));
        const __m128 r_hi = _mm256_cvtpd_ps(bounded_step_pd(g_hi, mask_hi, bvec));
        _mm_storeu_ps(out + j, r_lo);
        _mm_storeu_ps(out + j + 4, r_hi);
    }

    for (; j < cols; ++j) {
        float pred = prev[j];
        if (prev[j - 1] > pred)
            pred = prev[j - 1];
        out[j] = static_cast<float>(bounded_update(pred, match[j] ? +1 : -1, bound));
    }
}

void gain_row_unbounded_avx2(const float* prev, const std::uint8_t* match, float* out,
                             int cols, double /*bound*/) {
    const __m256 ones = _mm256_set1_ps(1.0f);
    const __m256 minus_ones = _mm256_set1_ps(-1.0f);
    const __m256 zero = _mm256_setzero_ps();

    int j = 0;
    if (cols > 0) {
        const float g = prev[0] + (match[0] ? 1.0f : -1.0f);
        out[0] = g < 0.0f ? 0.0f : g;
        j = 1;
    }

    for (; j + 8 <= cols; j += 8) {
        const __m256 vert = _mm256_loadu_ps(prev + j);
        const __m256 diag = _mm256_loadu_ps(prev + j - 1);
        const __m256 pred = _mm256_max_ps(vert, diag);

        const __m128i flags8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(match + j));
        const __m256i flags32 = _mm256_cvtepi8_epi32(flags8);
        const __m256 mask =
            _mm256_castsi256_ps(_mm256_cmpgt_epi32(flags32, _mm256_setzero_si256()));

        const __m256 step = _mm256_blendv_ps(minus_ones, ones, mask);
        const __m256 g = _mm256_add_ps(pred, step);
        _mm256_storeu_ps(out + j, _mm256_max_ps(g, zero));
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

#endif // x86_64
