#pragma once

#include "refrain/align.hpp"
#include "refrain/performance.hpp"
#include "refrain/score.hpp"

#include <string>
#include <utility>
#include <vector>

namespace refrain {

// One segment's local alignment: the backtracked path's row/column spans
// (inclusive) and the gain the path accrued inside the segment's column
// window (start-cell value minus the gain carried into the stop cell from
// earlier segments). An alignment is empty (all ranges -1, gain 0) when the
// performance rows ran out before the segment was reached.
struct SegmentAlignment {
    std::string label;
    int col_start = -1;
    int col_end = -1;
    int row_start = -1;
    int row_end = -1;
    float local_gain = 0.0f;
    std::vector<std::pair<int, int>> path; // (row, col), walked bottom-up

    bool empty() const { return row_start < 0; }
};

struct VersionResult {
    StructuralVersion version;
    std::vector<SegmentAlignment> alignments; // performance order
    double global_gain = 0.0;
    int covered_rows = 0;
};

struct InferConfig {
    double bound = 10.0;
    double lambda = 1.0; // per-segment penalty on the global gain
    int max_versions = kDefaultVersionLimit;
    Kernel kernel = Kernel::Auto;
};

// Everything one inference run produces; `best` is the selected version.
struct Inference {
    VersionResult best;
    std::vector<VersionResult> all; // enumeration order
    std::vector<Segment> segments;
    GainMatrix matrix;
};

// Walks from the highest-gain cell of the segment's column window at
// start_row (ties rightmost) through vertical/diagonal predecessors (ties
// diagonal) until the predecessor would leave the window, falls into the
// sub-1 decay tail, or row 0 is passed. The kept rows run from the start row
// up to the path's entry level; see the implementation notes for how the
// entry level is found.
SegmentAlignment backtrack_segment(const GainMatrix& matrix, const Segment& segment,
                                   int start_row);

// Backtracks the version's segments in reverse performance order, each
// starting one row above the previous alignment; exhausted rows leave the
// remaining segments empty. global_gain = sum(local) - lambda * #segments.
VersionResult align_version(const GainMatrix& matrix, const std::vector<Segment>& segments,
                            const StructuralVersion& version, double lambda);

// Highest global gain; ties prefer fewer segments, then the
// lexicographically smaller structure string.
const VersionResult& select_version(const std::vector<VersionResult>& results);

// Full pipeline: enumerate versions, accumulate the gain matrix once,
// align every version against it, select.
Inference infer_structure(const Score& score, const Performance& performance,
                          const InferConfig& config = {});

// Result JSON (schema is stable; see README):
//   {"performance", "score", "structure", "global_gain", "segments": [...]}
std::string result_to_json(const Inference& inference, const Score& score,
                           const Performance& performance);

} // namespace refrain
