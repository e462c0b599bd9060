#include "refrain/infer.hpp"

#include "refrain/errors.hpp"
#include "refrain/synthetic.hpp"

#include "support/builders.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <doctest.h>

using namespace refrain;
using namespace refrain::testing;

namespace {

Performance noiseless(const Score& score, const StructuralVersion& version) {
    return generate_synthetic(score, version, NoiseSpec{}, 0, "noiseless");
}

// Two unlabeled halves: a Segno boundary splits segments without repeats.
Score split_score(int half = 4) {
    Score s = single_pitch_score("split", half * 2);
    s.markers = {marker(MarkerKind::Segno, half)};
    return s;
}

} // namespace

TEST_CASE("backtracking an exact rendition covers the whole segment") {
    const Score s = single_pitch_score("exact", 4);
    const auto segments = segment_score(s);
    REQUIRE(segments.size() == 1);
    const StructuralVersion v{{0}, "A"};
    const GainMatrix m = accumulate(noiseless(s, v), s);

    const SegmentAlignment a = backtrack_segment(m, segments[0], m.rows - 1);
    CHECK(a.row_start == 0);
    CHECK(a.row_end == 3);
    CHECK(a.col_start == 0);
    CHECK(a.col_end == 3);
    CHECK(a.local_gain == m.at(3, 3));
    CHECK(a.local_gain == doctest::Approx(3.439));
    // Path steps are vertical or diagonal and stay inside the window.
    for (std::size_t i = 1; i < a.path.size(); ++i) {
        CHECK(a.path[i].first == a.path[i - 1].first - 1);
        const int dc = a.path[i - 1].second - a.path[i].second;
        CHECK((dc == 0 || dc == 1));
        CHECK(a.path[i].second >= segments[0].start);
        CHECK(a.path[i].second <= segments[0].end);
    }
}

TEST_CASE("backtracking a zero region is a single cell") {
    Score s;
    s.name = "zero";
    s.onsets = {{{60}}, {{61}}, {{62}}};
    Performance p;
    p.pitches = {90, 91, 92};
    const GainMatrix m = accumulate(p, s);
    const auto segments = segment_score(s);

    const SegmentAlignment a = backtrack_segment(m, segments[0], 2);
    CHECK(a.local_gain == 0.0f);
    CHECK(a.row_start == 2);
    CHECK(a.row_end == 2);
    CHECK(a.col_start == a.col_end);
    CHECK(a.col_end == segments[0].end); // argmax ties resolve rightmost
}

TEST_CASE("a width-one segment pins the column") {
    Score s = single_pitch_score("narrow", 5);
    s.markers = {marker(MarkerKind::Segno, 4)}; // segments A=[0,3], B=[4,4]
    const auto segments = segment_score(s);
    REQUIRE(segments[1].start == segments[1].end);
    const StructuralVersion v{{0, 1}, "AB"};
    const GainMatrix m = accumulate(noiseless(s, v), s);
    const SegmentAlignment a = backtrack_segment(m, segments[1], m.rows - 1);
    CHECK(a.col_start == 4);
    CHECK(a.col_end == 4);
}

TEST_CASE("aligning the generating version covers every row") {
    const Score s = repeat_toy_score();
    const auto segments = segment_score(s);
    const auto versions = enumerate_versions(s);
    REQUIRE(versions[0].structure == "ABB");
    const GainMatrix m = accumulate(noiseless(s, versions[0]), s);

    const VersionResult r = align_version(m, segments, versions[0], 1.0);
    CHECK(r.covered_rows == m.rows);

    // Contiguous, descending coverage from the bottom row.
    int expected_end = m.rows - 1;
    for (std::size_t k = r.alignments.size(); k-- > 0;) {
        const SegmentAlignment& a = r.alignments[k];
        REQUIRE(!a.empty());
        CHECK(a.row_end == expected_end);
        expected_end = a.row_start - 1;
    }
    CHECK(expected_end == -1);

    // And it beats every other enumerated version.
    for (std::size_t i = 1; i < versions.size(); ++i)
        CHECK(align_version(m, segments, versions[i], 1.0).global_gain < r.global_gain);
}

TEST_CASE("a version whose last segment is absent scores near zero") {
    const Score s = split_score();
    const auto segments = segment_score(s);
    // Performance renders only segment A.
    const StructuralVersion just_a{{0}, "A"};
    const GainMatrix m = accumulate(noiseless(s, just_a), s);

    const StructuralVersion ab{{0, 1}, "AB"};
    const VersionResult r = align_version(m, segments, ab, 1.0);
    CHECK(r.alignments[1].local_gain == 0.0f);
    CHECK(r.alignments[1].row_start == r.alignments[1].row_end); // stopped immediately
    CHECK(r.global_gain < align_version(m, segments, just_a, 1.0).global_gain);
}

TEST_CASE("single-segment versions align from the last row") {
    const Score s = single_pitch_score("single", 6);
    const auto segments = segment_score(s);
    const StructuralVersion v{{0}, "A"};
    const GainMatrix m = accumulate(noiseless(s, v), s);
    const VersionResult r = align_version(m, segments, v, 1.0);
    REQUIRE(r.alignments.size() == 1);
    CHECK(r.alignments[0].row_end == m.rows - 1);
}

TEST_CASE("more segments than rows leaves the leading segments empty") {
    const Score s = split_score(2); // A=[0,1], B=[2,3]
    const auto segments = segment_score(s);
    Performance p;
    p.pitches = {0}; // one row only
    const GainMatrix m = accumulate(p, s);
    const StructuralVersion ab{{0, 1}, "AB"};
    const VersionResult r = align_version(m, segments, ab, 0.5);
    CHECK(r.alignments[0].empty());
    CHECK(!r.alignments[1].empty());
    CHECK(r.alignments[0].local_gain == 0.0f);
    CHECK(r.global_gain == doctest::Approx(r.alignments[1].local_gain - 1.0));
}

TEST_CASE("select_version maximizes gain with documented tie-breaks") {
    auto result = [](std::string structure, double gain) {
        VersionResult r;
        r.version.structure = structure;
        r.version.segment_refs.assign(structure.size(), 0);
        r.global_gain = gain;
        return r;
    };

    SUBCASE("highest gain wins") {
        const std::vector<VersionResult> rs{result("AB", 50.0), result("ABB", 72.3)};
        CHECK(select_version(rs).version.structure == "ABB");
    }
    SUBCASE("single candidate") {
        const std::vector<VersionResult> rs{result("A", 1.0)};
        CHECK(select_version(rs).version.structure == "A");
    }
    SUBCASE("tie prefers fewer segments") {
        const std::vector<VersionResult> rs{result("ABB", 10.0), result("AB", 10.0)};
        CHECK(select_version(rs).version.structure == "AB");
    }
    SUBCASE("tie on count prefers the smaller string") {
        const std::vector<VersionResult> rs{result("BA", 10.0), result("AB", 10.0)};
        CHECK(select_version(rs).version.structure == "AB");
    }
    SUBCASE("empty input is degenerate") {
        CHECK_THROWS_AS(select_version({}), DegenerateInputError);
    }
}

TEST_CASE("shifting every gain by a constant keeps the selection") {
    const Score s = volta_toy_score();
    const auto segments = segment_score(s);
    const auto versions = enumerate_versions(s);
    const GainMatrix m = accumulate(noiseless(s, versions[0]), s);

    std::vector<VersionResult> results;
    for (const auto& v : versions)
        results.push_back(align_version(m, segments, v, 1.0));
    const std::string picked = select_version(results).version.structure;

    for (double shift : {-7.5, 3.25, 1e4}) {
        std::vector<VersionResult> shifted = results;
        for (auto& r : shifted)
            r.global_gain += shift;
        CHECK(select_version(shifted).version.structure == picked);
    }
}

TEST_CASE("global gain falls by lambda per segment") {
    const Score s = repeat_toy_score();
    const auto segments = segment_score(s);
    const auto versions = enumerate_versions(s);
    const GainMatrix m = accumulate(noiseless(s, versions[0]), s);

    for (const auto& v : versions) {
        const VersionResult r1 = align_version(m, segments, v, 1.0);
        const VersionResult r2 = align_version(m, segments, v, 2.5);
        const double n = static_cast<double>(v.segment_refs.size());
        CHECK(r2.global_gain - r1.global_gain == doctest::Approx(-1.5 * n).epsilon(1e-12));
    }
}

TEST_CASE("infer_structure recovers the generating version") {
    SUBCASE("repeat toy ABB") {
        const Score s = repeat_toy_score();
        const auto versions = enumerate_versions(s);
        const Inference inf = infer_structure(s, noiseless(s, versions[0]));
        CHECK(inf.best.version.structure == "ABB");
    }
    SUBCASE("no markers means structure A") {
        const Score s = single_pitch_score("plain", 8);
        const StructuralVersion v{{0}, "A"};
        const Inference inf = infer_structure(s, noiseless(s, v));
        CHECK(inf.best.version.structure == "A");
    }
    SUBCASE("volta toy, both versions") {
        const Score s = volta_toy_score();
        for (const auto& v : enumerate_versions(s)) {
            const Inference inf = infer_structure(s, noiseless(s, v));
            CHECK(inf.best.version.structure == v.structure);
        }
    }
    SUBCASE("op22 layout, all repeats taken") {
        const Score s = op22_layout_score();
        const auto versions = enumerate_versions(s);
        REQUIRE(versions[0].structure == "AABBCCDEDFAB");
        const Inference inf = infer_structure(s, noiseless(s, versions[0]));
        CHECK(inf.best.version.structure == "AABBCCDEDFAB");
        CHECK(inf.best.covered_rows == inf.matrix.rows);
    }
}

TEST_CASE("noiseless recovery on random scores when pitch-distinguishable") {
    SyntheticRng rng(41);
    int checked = 0;
    for (int it = 0; it < 40; ++it) {
        const Score s = random_structured_score(rng, 3);
        const auto segments = segment_score(s);
        const auto versions = enumerate_versions(s);
        const auto& target = versions[rng.uniform_int(0, static_cast<int>(versions.size()) - 1)];

        const auto target_pitches = unfolded_pitches(s, segments, target);
        bool distinguishable = true;
        for (const auto& other : versions)
            if (other.structure != target.structure &&
                unfolded_pitches(s, segments, other) == target_pitches)
                distinguishable = false;

        const Inference inf = infer_structure(s, noiseless(s, target));
        if (distinguishable) {
            CHECK(inf.best.version.structure == target.structure);
            ++checked;
        } else {
            CHECK(unfolded_pitches(s, segments, inf.best.version) == target_pitches);
        }
    }
    CHECK(checked > 20); // generator must mostly produce distinguishable cases
}

TEST_CASE("indistinguishable versions fall back to the tie-break") {
    // Two repeated sections with identical content: AAB and ABB unfold to the
    // same pitch sequence.
    Score s;
    s.name = "twins";
    for (int rep = 0; rep < 2; ++rep)
        for (int i = 0; i < 4; ++i)
            s.onsets.push_back({{static_cast<std::uint8_t>(60 + i)}});
    s.markers = {marker(MarkerKind::RepeatStart, 0), marker(MarkerKind::RepeatEnd, 4),
                 marker(MarkerKind::RepeatStart, 4), marker(MarkerKind::RepeatEnd, 8)};

    const auto segments = segment_score(s);
    const auto versions = enumerate_versions(s);
    const auto aab = std::find_if(versions.begin(), versions.end(),
                                  [](const auto& v) { return v.structure == "AAB"; });
    REQUIRE(aab != versions.end());

    const Inference inf = infer_structure(s, noiseless(s, *aab));
    CHECK(unfolded_pitches(s, segments, inf.best.version) ==
          unfolded_pitches(s, segments, *aab));

    // Re-applying the documented selection over the stored results must
    // reproduce the choice.
    CHECK(select_version(inf.all).version.structure == inf.best.version.structure);
}

TEST_CASE("versions can be aligned concurrently against one matrix") {
    const Score s = op22_layout_score();
    const auto segments = segment_score(s);
    const auto versions = enumerate_versions(s);
    const GainMatrix m = accumulate(noiseless(s, versions[0]), s);

    std::vector<VersionResult> serial;
    for (const auto& v : versions)
        serial.push_back(align_version(m, segments, v, 1.0));

    std::vector<VersionResult> parallel(versions.size());
    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w)
        workers.emplace_back([&, w] {
            for (std::size_t i = w; i < versions.size(); i += 4)
                parallel[i] = align_version(m, segments, versions[i], 1.0);
        });
    for (auto& t : workers)
        t.join();

    for (std::size_t i = 0; i < versions.size(); ++i) {
        CHECK(parallel[i].global_gain == serial[i].global_gain);
        CHECK(parallel[i].covered_rows == serial[i].covered_rows);
    }
}

TEST_CASE("result JSON carries the schema fields") {
    const Score s = repeat_toy_score();
    const auto versions = enumerate_versions(s);
    const Performance p = noiseless(s, versions[0]);
    const Inference inf = infer_structure(s, p);
    const std::string text = result_to_json(inf, s, p);
    CHECK(text.find("\"performance\"") != std::string::npos);
    CHECK(text.find("\"score\"") != std::string::npos);
    CHECK(text.find("\"structure\": \"ABB\"") != std::string::npos);
    CHECK(text.find("\"global_gain\"") != std::string::npos);
    CHECK(text.find("\"score_cols\"") != std::string::npos);
    CHECK(text.find("\"perf_rows\"") != std::string::npos);
    CHECK(text.find("\"local_gain\"") != std::string::npos);
}
