#pragma once

#include <cstdint>

// Row kernels for the gain accumulation sweep. Each call computes one
// matrix row from the previous one:
//
//   pred(j) = max(prev[j], j > 0 ? prev[j-1] : 0)
//   out[j]  = update(pred(j), match[j] ? +1 : -1)
//
// prev and out must not alias; match[j] is 1 where the row's pitch is in
// score onset j. Bounded kernels do the update in double precision and
// store float32; all variants of one rule are bit-identical.

namespace refrain::detail {

void gain_row_bounded_scalar(const float* prev, const std::uint8_t* match, float* out,
                             int cols, double bound);
void gain_row_unbounded_scalar(const float* prev, const std::uint8_t* match, float* out,
                               int cols, double bound);

#if defined(__x86_64__) || defined(_M_X64)
void gain_row_bounded_avx2(const float* prev, const std::uint8_t* match, float* out,
                           int cols, double bound);
void gain_row_unbounded_avx2(const float* prev, const std::uint8_t* match, float* out,
                             int cols, double bound);
#endif

#if defined(__aarch64__)
void gain_row_bounded_neon(const float* prev, const std::uint8_t* match, float* out,
                           int cols, double bound);
void gain_row_unbounded_neon(const float* prev, const std::uint8_t* match, float* out,
                             int cols, double bound);
#endif

} // namespace refrain::detail
