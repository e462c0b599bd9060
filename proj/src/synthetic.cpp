#include "refrain/synthetic.hpp"

#include "refrain/errors.hpp"

namespace refrain {

double SyntheticRng::uniform() {
    // 53 random bits over [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int SyntheticRng::uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span + 1) % span;
    for (;;) {
        const std::uint64_t v = engine_();
        if (v <= limit)
            return lo + static_cast<int>(v % span);
    }
}

int SyntheticRng::random_pitch() {
    return uniform_int(0, 127);
}

int SyntheticRng::different_pitch(int pitch) {
    const int v = uniform_int(0, 126);
    return v < pitch ? v : v + 1;
}

Performance generate_synthetic(const Score& score, const StructuralVersion& version,
                               const NoiseSpec& noise, std::uint64_t seed,
                               std::string source) {
    if (noise.substitution_rate < 0.0 || noise.substitution_rate >= 1.0 ||
        noise.deletion_rate < 0.0 || noise.deletion_rate >= 1.0 ||
        noise.insertion_rate < 0.0 || noise.insertion_rate >= 1.0)
        throw ValidationError("noise rates must lie in [0, 1)");

    const std::vector<Segment> segments = segment_score(score);
    const std::vector<int> onsets = unfold(segments, version);

    std::vector<std::uint8_t> clean;
    for (int idx : onsets)
        for (std::uint8_t p : score.onsets[idx].pitches) // already ascending
            clean.push_back(p);

    SyntheticRng rng(seed);
    Performance out;
    out.source = std::move(source);
    out.pitches.reserve(clean.size());
    for (std::uint8_t p : clean) {
        if (noise.insertion_rate > 0.0 && rng.uniform() < noise.insertion_rate)
            out.pitches.push_back(static_cast<std::uint8_t>(rng.random_pitch()));
        if (noise.deletion_rate > 0.0 && rng.uniform() < noise.deletion_rate)
            continue;
        if (noise.substitution_rate > 0.0 && rng.uniform() < noise.substitution_rate)
            out.pitches.push_back(static_cast<std::uint8_t>(rng.different_pitch(p)));
        else
            out.pitches.push_back(p);
    }
    return out;
}

} // namespace refrain
