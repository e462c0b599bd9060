#include "refrain/infer.hpp"

#include "refrain/errors.hpp"

#include <algorithm>

#include <json.hpp>

namespace refrain {

SegmentAlignment backtrack_segment(const GainMatrix& matrix, const Segment& segment,
                                   int start_row) {
    SegmentAlignment a;
    a.label = segment.label;

    // Start at the window's best cell on the start row, ties rightmost.
    int col = segment.start;
    for (int j = segment.start; j <= segment.end; ++j)
        if (matrix.at(start_row, j) >= matrix.at(start_row, col))
            col = j;

    const float start_gain = matrix.at(start_row, col);
    a.row_start = a.row_end = start_row;
    a.col_start = a.col_end = col;
    a.path.emplace_back(start_row, col);
    if (start_gain == 0.0f)
        return a;

    // Walk the recurrence's own predecessor chain (ties diagonal). Vertical
    // steps may continue at the window's first column (a chord there spans
    // several rows); the chain ends where the dominant predecessor would
    // leave the window, fall into the sub-1 tail (the bounded scheme's
    // effective zero; exact zero under the unbounded rule), or pass row 0.
    int row = start_row;
    int col_walk = col;
    std::vector<float> chain{start_gain};
    float terminal = 0.0f; // gain carried into the chain's last cell
    while (row > 0) {
        const float vert = matrix.at(row - 1, col_walk);
        const float diag = col_walk > 0 ? matrix.at(row - 1, col_walk - 1) : 0.0f;
        const bool diagonal = col_walk > 0 && diag >= vert;
        const float best = diagonal ? diag : vert;
        if (best < 1.0f) {
            terminal = best;
            break;
        }
        if (diagonal && col_walk - 1 < segment.start) {
            terminal = best;
            break;
        }
        if (diagonal)
            --col_walk;
        --row;
        a.path.emplace_back(row, col_walk);
        chain.push_back(best);
    }

    // The start row may sit a few decay cells below the segment's own ridge
    // (an earlier backtrack can leave trailing rows behind), so the chain
    // first climbs onto the ridge: its peak is the chain maximum, accepted
    // only if the climb never dips more than one mismatch unit below the
    // start value. A deeper dip is the valley between two renditions, and a
    // maximum beyond it belongs to an earlier segment's ridge.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < chain.size(); ++i)
        if (chain[i] > chain[peak])
            peak = i;
    for (std::size_t i = 0; i <= peak; ++i) {
        if (chain[i] < chain[0] - 1.0f) {
            peak = 0;
            break;
        }
    }

    // Past the peak, cut at the entry level: the minimum of the walked gains
    // and the carried terminal. Rows at or above the minimum cell belong to
    // earlier segments; the segment's own gain is the peak's climb above
    // the entry level. Only low minima qualify as an entry (a gap remnant
    // decays below half the bound); shallow dips are noise inside one
    // rendition and must not split the path.
    const float restart_ceiling = static_cast<float>(matrix.bound) * 0.5f;
    std::size_t cut = chain.size(); // cutting at size() keeps the whole path
    float entry = terminal;
    for (std::size_t i = peak + 1; i < chain.size(); ++i) {
        if (chain[i] < entry && chain[i] < restart_ceiling) {
            entry = chain[i];
            cut = i;
        }
    }
    a.path.resize(cut);
    a.row_start = a.path.back().first;
    a.col_start = a.path.back().second;
    const float gain = chain[peak] - entry;
    a.local_gain = gain > 0.0f ? gain : 0.0f;
    return a;
}

VersionResult align_version(const GainMatrix& matrix, const std::vector<Segment>& segments,
                            const StructuralVersion& version, double lambda) {
    VersionResult r;
    r.version = version;
    r.alignments.resize(version.segment_refs.size());

    int row = matrix.rows - 1;
    for (std::size_t k = version.segment_refs.size(); k-- > 0;) {
        const Segment& segment = segments.at(version.segment_refs[k]);
        if (row < 0) {
            r.alignments[k].label = segment.label;
            continue;
        }
        r.alignments[k] = backtrack_segment(matrix, segment, row);
        row = r.alignments[k].row_start - 1;
    }

    double sum = 0.0;
    for (const SegmentAlignment& a : r.alignments) {
        sum += a.local_gain;
        if (!a.empty())
            r.covered_rows += a.row_end - a.row_start + 1;
    }
    r.global_gain = sum - lambda * static_cast<double>(version.segment_refs.size());
    return r;
}

const VersionResult& select_version(const std::vector<VersionResult>& results) {
    if (results.empty())
        throw DegenerateInputError("no version results to select from");
    const VersionResult* best = &results.front();
    for (const VersionResult& r : results) {
        if (r.global_gain > best->global_gain) {
            best = &r;
        } else if (r.global_gain == best->global_gain) {
            const auto key = [](const VersionResult& v) {
                return std::make_pair(v.version.segment_refs.size(), v.version.structure);
            };
            if (key(r) < key(*best))
                best = &r;
        }
    }
    return *best;
}

Inference infer_structure(const Score& score, const Performance& performance,
                          const InferConfig& config) {
    Inference inf;
    const ScoreStructure st = analyze_score(score);
    inf.segments = st.segments;

    const std::vector<StructuralVersion> versions =
        enumerate_versions(score, config.max_versions);

    AccumulateOptions opts;
    opts.bound = config.bound;
    opts.kernel = config.kernel;
    inf.matrix = accumulate(performance, score, opts);

    inf.all.reserve(versions.size());
    for (const StructuralVersion& v : versions)
        inf.all.push_back(align_version(inf.matrix, inf.segments, v, config.lambda));
    inf.best = select_version(inf.all);
    return inf;
}

std::string result_to_json(const Inference& inference, const Score& score,
                           const Performance& performance) {
    nlohmann::ordered_json doc;
    doc["performance"] = performance.source;
    doc["score"] = score.name;
    doc["structure"] = inference.best.version.structure;
    doc["global_gain"] = inference.best.global_gain;
    doc["segments"] = nlohmann::ordered_json::array();
    for (const SegmentAlignment& a : inference.best.alignments) {
        nlohmann::ordered_json entry;
        entry["label"] = a.label;
        entry["score_cols"] = {a.col_start, a.col_end};
        entry["perf_rows"] = {a.row_start, a.row_end};
        entry["local_gain"] = static_cast<double>(a.local_gain);
        doc["segments"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

} // namespace refrain
