#pragma once

// Shared score/performance builders for the unit and acceptance suites.

#include "refrain/score.hpp"
#include "refrain/synthetic.hpp"

#include <string>
#include <vector>

namespace refrain::testing {

// n onsets, each a single pitch base, base+1, ...
inline Score single_pitch_score(const std::string& name, int n, int base = 60) {
    Score s;
    s.name = name;
    for (int i = 0; i < n; ++i)
        s.onsets.push_back({{static_cast<std::uint8_t>(base + i)}});
    return s;
}

inline Marker marker(MarkerKind kind, int position, int number = 0) {
    return Marker{kind, position, number};
}

// A |: B :| over 8 onsets: versions ABB and AB.
inline Score repeat_toy_score() {
    Score s = single_pitch_score("repeat-toy", 8);
    s.markers = {marker(MarkerKind::RepeatStart, 4), marker(MarkerKind::RepeatEnd, 8)};
    return s;
}

// A |: B 1.[C] :| 2.[D] over 8 onsets: versions ABCBD and ABD.
inline Score volta_toy_score() {
    Score s = single_pitch_score("volta-toy", 8);
    s.markers = {
        marker(MarkerKind::RepeatStart, 2),  marker(MarkerKind::VoltaStart, 4, 1),
        marker(MarkerKind::RepeatEnd, 6),    marker(MarkerKind::VoltaEnd, 6),
        marker(MarkerKind::VoltaStart, 6, 2), marker(MarkerKind::VoltaEnd, 8),
    };
    return s;
}

// The layout of Beethoven Op. 22 third movement: repeats around A, B, C and
// D, the D repeat ending in volta brackets E/F, a Fine after B and a Da Capo
// al Fine after F. Six segments of 4 onsets each.
inline Score op22_layout_score() {
    Score s = single_pitch_score("op22-layout", 24, 48);
    s.markers = {
        marker(MarkerKind::RepeatStart, 0),   marker(MarkerKind::RepeatEnd, 4),
        marker(MarkerKind::RepeatStart, 4),   marker(MarkerKind::RepeatEnd, 8),
        marker(MarkerKind::Fine, 8),
        marker(MarkerKind::RepeatStart, 8),   marker(MarkerKind::RepeatEnd, 12),
        marker(MarkerKind::RepeatStart, 12),
        marker(MarkerKind::VoltaStart, 16, 1), marker(MarkerKind::VoltaEnd, 20),
        marker(MarkerKind::RepeatEnd, 20),
        marker(MarkerKind::VoltaStart, 20, 2), marker(MarkerKind::VoltaEnd, 24),
        marker(MarkerKind::DaCapoAlFine, 24),
    };
    return s;
}

// Uniformly random scores for recovery experiments: 1..max_repeats repeat
// sections separated by optional plain spans, at most one volta pair, an
// optional da capo al fine. Span lengths follow real repertoire (repeated
// sections of a dozen or more onsets); much shorter sections sit outside
// the bounded scheme's operating regime, since the decay tail of a
// saturated ridge then outlasts the section.
inline Score random_structured_score(SyntheticRng& rng, int max_repeats = 4,
                                     bool allow_volta = true, bool allow_dacapo = true) {
    Score s;
    s.name = "random";

    auto append_span = [&](int n) {
        for (int i = 0; i < n; ++i) {
            ScoreOnset onset;
            const int chord = rng.uniform_int(1, 3);
            for (int c = 0; c < chord; ++c)
                onset.pitches.push_back(static_cast<std::uint8_t>(rng.uniform_int(21, 108)));
            std::sort(onset.pitches.begin(), onset.pitches.end());
            onset.pitches.erase(std::unique(onset.pitches.begin(), onset.pitches.end()),
                                onset.pitches.end());
            s.onsets.push_back(std::move(onset));
        }
    };
    auto boundary = [&] { return static_cast<int>(s.onsets.size()); };

    const int repeats = rng.uniform_int(1, max_repeats);
    const int volta_at = allow_volta && rng.uniform_int(0, 1) ? rng.uniform_int(0, repeats - 1)
                                                              : -1;
    std::vector<int> block_bounds;

    if (rng.uniform_int(0, 1))
        append_span(rng.uniform_int(6, 12));

    for (int r = 0; r < repeats; ++r) {
        block_bounds.push_back(boundary());
        s.markers.push_back(marker(MarkerKind::RepeatStart, boundary()));
        append_span(rng.uniform_int(10, 22));
        if (r == volta_at) {
            s.markers.push_back(marker(MarkerKind::VoltaStart, boundary(), 1));
            append_span(rng.uniform_int(4, 8));
            const int re = boundary();
            s.markers.push_back(marker(MarkerKind::VoltaEnd, re));
            s.markers.push_back(marker(MarkerKind::RepeatEnd, re));
            s.markers.push_back(marker(MarkerKind::VoltaStart, re, 2));
            append_span(rng.uniform_int(4, 8));
            s.markers.push_back(marker(MarkerKind::VoltaEnd, boundary()));
        } else {
            s.markers.push_back(marker(MarkerKind::RepeatEnd, boundary()));
        }
        if (rng.uniform_int(0, 1))
            append_span(rng.uniform_int(6, 16));
    }
    block_bounds.push_back(boundary());

    if (allow_dacapo && rng.uniform_int(0, 3) == 0) {
        // Fine at a block boundary strictly inside the piece.
        std::vector<int> candidates;
        for (int b : block_bounds)
            if (b > 0 && b < boundary())
                candidates.push_back(b);
        if (!candidates.empty()) {
            const int fine = candidates[rng.uniform_int(
                0, static_cast<int>(candidates.size()) - 1)];
            s.markers.push_back(marker(MarkerKind::Fine, fine));
            s.markers.push_back(marker(MarkerKind::DaCapoAlFine, boundary()));
        }
    }
    return s;
}

// Ascending-pitch serialization of a version's unfolded onsets; what a
// noiseless synthetic performance contains.
inline std::vector<std::uint8_t> unfolded_pitches(const Score& score,
                                                  const std::vector<Segment>& segments,
                                                  const StructuralVersion& version) {
    std::vector<std::uint8_t> out;
    for (int idx : unfold(segments, version))
        for (std::uint8_t p : score.onsets[idx].pitches)
            out.push_back(p);
    return out;
}

} // namespace refrain::testing
