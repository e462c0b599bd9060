#pragma once

#include "refrain/performance.hpp"
#include "refrain/score.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace refrain {

// Deterministic generator with identical output on every platform: the
// mt19937_64 stream is standardized, and the bounded draws below replace
// the implementation-defined std::uniform_* distributions.
class SyntheticRng {
public:
    explicit SyntheticRng(std::uint64_t seed) : engine_(seed) {}

    double uniform();                // [0, 1)
    int uniform_int(int lo, int hi); // inclusive, unbiased via rejection
    int random_pitch();              // 0..127
    int different_pitch(int pitch);  // 0..127, never equal to pitch

private:
    std::mt19937_64 engine_;
};

struct NoiseSpec {
    double substitution_rate = 0.0;
    double deletion_rate = 0.0;
    double insertion_rate = 0.0;
};

// Serializes unfold(version) pitch sets in ascending pitch order, then
// walks the sequence once: possibly insert a random pitch before a note,
// possibly delete the note, else possibly substitute it.
Performance generate_synthetic(const Score& score, const StructuralVersion& version,
                               const NoiseSpec& noise, std::uint64_t seed,
                               std::string source = "synthetic");

} // namespace refrain
