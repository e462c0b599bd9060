#pragma once

#include "refrain/align.hpp"
#include "refrain/infer.hpp"

#include <string>
#include <vector>

namespace refrain {

// Renders the gain matrix as binary PGM (P5, maxval 255): width = score
// onsets, height = performance rows, pixel = round(255 * gain / bound).
// With alignments, every backtracked path cell is forced to 255.
std::string heatmap_pgm(const GainMatrix& matrix,
                        const std::vector<SegmentAlignment>* alignments = nullptr);

// Same, written to a file. Throws IoError on an unwritable path.
void emit_heatmap(const GainMatrix& matrix, const std::vector<SegmentAlignment>* alignments,
                  const std::string& path);

} // namespace refrain
