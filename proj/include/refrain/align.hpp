#pragma once

#include "refrain/performance.hpp"
#include "refrain/score.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refrain {

// Accumulated local-alignment gain. Rows are performed pitches, columns are
// score onsets, row-major float32. Every cell lies in [0, bound).
struct GainMatrix {
    int rows = 0;
    int cols = 0;
    double bound = 10.0;
    std::vector<float> values;

    float at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * cols + col];
    }
    float* row_ptr(int row) { return values.data() + static_cast<std::size_t>(row) * cols; }
    const float* row_ptr(int row) const {
        return values.data() + static_cast<std::size_t>(row) * cols;
    }
};

// Match/mismatch gain between one performed pitch and one score onset.
inline int local_metric(int pitch, const ScoreOnset& onset) {
    return onset.contains(pitch) ? +1 : -1;
}

// One accumulation step. Matches climb toward the bound with exponentially
// shrinking increments; mismatches fall by 1 above gain 1 and halve at or
// below it, so the value never leaves [0, bound).
inline double bounded_update(double prev_gain, int metric, double bound) {
    if (metric > 0)
        return prev_gain + (1.0 - prev_gain / bound);
    return prev_gain > 1.0 ? prev_gain - 1.0 : prev_gain * 0.5;
}

enum class GainRule {
    Bounded,   // bounded_update
    Unbounded, // textbook Smith-Waterman step: max(0, gain +/- 1)
};

enum class Kernel {
    Auto,   // best available at runtime
    Scalar,
    Avx2,
    Neon,
};

const char* kernel_name(Kernel kernel);
bool kernel_available(Kernel kernel);
Kernel detect_kernel(); // the kernel Auto resolves to

struct AccumulateOptions {
    double bound = 10.0;
    GainRule rule = GainRule::Bounded;
    Kernel kernel = Kernel::Auto;
};

// Fills the gain matrix: cell (i, j) applies the update rule to the larger
// of the vertical (i-1, j) and diagonal (i-1, j-1) predecessors, 0 outside
// the matrix. There is no horizontal step. Scalar and SIMD kernels produce
// bit-identical results.
// Throws DegenerateInputError on an empty performance or score.
GainMatrix accumulate(const Performance& performance, const Score& score,
                      const AccumulateOptions& options);
GainMatrix accumulate(const Performance& performance, const Score& score,
                      double bound = 10.0);

} // namespace refrain
