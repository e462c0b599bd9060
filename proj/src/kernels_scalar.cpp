#include "kernel_rows.hpp"

#include "refrain/align.hpp"

namespace refrain::detail {

void gain_row_bounded_scalar(const float* prev, const std::uint8_t* match, float* out,
                             int cols, double bound) {
    for (int j = 0; j < cols; ++j) {
        float pred = prev[j];
        if (j > 0 && prev[j - 1] > pred)
            pred = prev[j - 1];
        out[j] = static_cast<float>(bounded_update(pred, match[j] ? +1 : -1, bound));
    }
}

void gain_row_unbounded_scalar(const float* prev, const std::uint8_t* match, float* out,
                               int cols, double /*bound*/) {
    for (int j = 0; j < cols; ++j) {
        float pred = prev[j];
        if (j > 0 && prev[j - 1] > pred)
            pred = prev[j - 1];
        const float g = pred + (match[j] ? 1.0f : -1.0f);
        out[j] = g < 0.0f ? 0.0f : g;
    }
}

} // namespace refrain::detail
