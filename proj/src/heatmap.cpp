#include "refrain/heatmap.hpp"

#include "refrain/errors.hpp"

#include <cmath>
#include <fstream>

namespace refrain {

std::string heatmap_pgm(const GainMatrix& matrix,
                        const std::vector<SegmentAlignment>* alignments) {
    if (matrix.rows == 0 || matrix.cols == 0)
        throw DegenerateInputError("cannot render an empty gain matrix");

    std::string out = "P5\n" + std::to_string(matrix.cols) + " " +
                      std::to_string(matrix.rows) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + static_cast<std::size_t>(matrix.rows) * matrix.cols);

    unsigned char* pixels = reinterpret_cast<unsigned char*>(out.data() + header);
    for (int i = 0; i < matrix.rows; ++i) {
        const float* row = matrix.row_ptr(i);
        for (int j = 0; j < matrix.cols; ++j) {
            long v = std::lround(255.0 * static_cast<double>(row[j]) / matrix.bound);
            if (v < 0)
                v = 0;
            if (v > 255)
                v = 255;
            pixels[static_cast<std::size_t>(i) * matrix.cols + j] =
                static_cast<unsigned char>(v);
        }
    }

    if (alignments) {
        for (const SegmentAlignment& a : *alignments)
            for (const auto& [row, col] : a.path)
                pixels[static_cast<std::size_t>(row) * matrix.cols + col] = 255;
    }
    return out;
}

void emit_heatmap(const GainMatrix& matrix, const std::vector<SegmentAlignment>* alignments,
                  const std::string& path) {
    const std::string pgm = heatmap_pgm(matrix, alignments);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write heatmap: " + path);
    out.write(pgm.data(), static_cast<std::streamsize>(pgm.size()));
    if (!out)
        throw IoError("failed while writing heatmap: " + path);
}

} // namespace refrain
