#include "refrain/align.hpp"

#include "refrain/errors.hpp"

#include "kernel_rows.hpp"

#include <array>

namespace refrain {

namespace {

using RowKernel = void (*)(const float*, const std::uint8_t*, float*, int, double);

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

RowKernel row_kernel_for(GainRule rule, Kernel kernel) {
    switch (kernel) {
    case Kernel::Auto:
        return row_kernel_for(rule, detect_kernel());
    case Kernel::Scalar:
        return rule == GainRule::Bounded ? detail::gain_row_bounded_scalar
                                         : detail::gain_row_unbounded_scalar;
    case Kernel::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
        if (cpu_has_avx2())
            return rule == GainRule::Bounded ? detail::gain_row_bounded_avx2
                                             : detail::gain_row_unbounded_avx2;
#endif
        throw ValidationError("AVX2 kernel not available on this machine");
    case Kernel::Neon:
#if defined(__aarch64__)
        return rule == GainRule::Bounded ? detail::gain_row_bounded_neon
                                         : detail::gain_row_unbounded_neon;
#else
        throw ValidationError("NEON kernel not available on this machine");
#endif
    }
    return detail::gain_row_bounded_scalar;
}

} // namespace

const char* kernel_name(Kernel kernel) {
    switch (kernel) {
    case Kernel::Auto: return "auto";
    case Kernel::Scalar: return "scalar";
    case Kernel::Avx2: return "avx2";
    case Kernel::Neon: return "neon";
    }
    return "?";
}

bool kernel_available(Kernel kernel) {
    switch (kernel) {
    case Kernel::Auto:
    case Kernel::Scalar:
        return true;
    case Kernel::Avx2:
        return cpu_has_avx2();
    case Kernel::Neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Kernel detect_kernel() {
#if defined(__aarch64__)
    return Kernel::Neon;
#else
    return cpu_has_avx2() ? Kernel::Avx2 : Kernel::Scalar;
#endif
}

GainMatrix accumulate(const Performance& performance, const Score& score,
                      const AccumulateOptions& options) {
    if (performance.pitches.empty())
        throw DegenerateInputError("performance is empty");
    if (score.onsets.empty())
        throw DegenerateInputError("score has no onsets");
    if (options.bound <= 1.0)
        throw ValidationError("gain bound must exceed 1");

    const int rows = static_cast<int>(performance.pitches.size());
    const int cols = static_cast<int>(score.onsets.size());
    const RowKernel kernel = row_kernel_for(options.rule, options.kernel);

    GainMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.bound = options.bound;
    m.values.resize(static_cast<std::size_t>(rows) * cols);

    // 128-bit pitch-presence mask per onset.
    std::vector<std::array<std::uint64_t, 2>> onset_bits(cols, {0, 0});
    for (int j = 0; j < cols; ++j)
        for (std::uint8_t p : score.onsets[j].pitches)
            onset_bits[j][p >> 6] |= std::uint64_t{1} << (p & 63);

    // Match flags per distinct performed pitch, built on first use.
    std::array<std::vector<std::uint8_t>, 128> match_rows;
    auto match_row = [&](std::uint8_t pitch) -> const std::uint8_t* {
        std::vector<std::uint8_t>& row = match_rows[pitch];
        if (row.empty()) {
            row.resize(cols);
            for (int j = 0; j < cols; ++j)
                row[j] = (onset_bits[j][pitch >> 6] >> (pitch & 63)) & 1;
        }
        return row.data();
    };

    const std::vector<float> zero_row(cols, 0.0f);
    for (int i = 0; i < rows; ++i) {
        const float* prev = i == 0 ? zero_row.data() : m.row_ptr(i - 1);
        kernel(prev, match_row(performance.pitches[i]), m.row_ptr(i), cols, options.bound);
    }
    return m;
}

GainMatrix accumulate(const Performance& performance, const Score& score, double bound) {
    AccumulateOptions options;
    options.bound = bound;
    return accumulate(performance, score, options);
}

} // namespace refrain
