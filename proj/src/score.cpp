#include "refrain/score.hpp"

#include "refrain/errors.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace refrain {

namespace {

std::string at_boundary(int position) {
    return " at boundary " + std::to_string(position);
}

} // namespace

bool ScoreOnset::contains(int pitch) const {
    return std::binary_search(pitches.begin(), pitches.end(),
                              static_cast<std::uint8_t>(pitch));
}

const char* marker_kind_name(MarkerKind kind) {
    switch (kind) {
    case MarkerKind::RepeatStart: return "RepeatStart";
    case MarkerKind::RepeatEnd: return "RepeatEnd";
    case MarkerKind::VoltaStart: return "VoltaStart";
    case MarkerKind::VoltaEnd: return "VoltaEnd";
    case MarkerKind::Segno: return "Segno";
    case MarkerKind::Fine: return "Fine";
    case MarkerKind::CodaSign: return "CodaSign";
    case MarkerKind::ToCoda: return "ToCoda";
    case MarkerKind::DaCapoAlFine: return "DaCapoAlFine";
    case MarkerKind::DaCapoAlCoda: return "DaCapoAlCoda";
    case MarkerKind::DalSegnoAlFine: return "DalSegnoAlFine";
    case MarkerKind::DalSegnoAlCoda: return "DalSegnoAlCoda";
    }
    return "?";
}

std::string segment_label(int index) {
    std::string label;
    int n = index + 1; // bijective base 26
    while (n > 0) {
        int digit = (n - 1) % 26;
        label.insert(label.begin(), static_cast<char>('A' + digit));
        n = (n - 1) / 26;
    }
    return label;
}

namespace {

void validate_onsets(const Score& score) {
    if (score.onsets.empty())
        throw ValidationError("score '" + score.name + "' has no onsets");
    for (std::size_t i = 0; i < score.onsets.size(); ++i) {
        if (score.onsets[i].pitches.empty())
            throw ValidationError("onset " + std::to_string(i) + " has an empty pitch set");
    }
}

std::vector<RepeatSection> collect_repeats(const Score& score) {
    // Scan starts/ends in boundary order; RepeatEnd sorts before RepeatStart
    // at the same boundary so back-to-back sections stay disjoint.
    std::vector<const Marker*> rep;
    for (const Marker& m : score.markers)
        if (m.kind == MarkerKind::RepeatStart || m.kind == MarkerKind::RepeatEnd)
            rep.push_back(&m);
    std::stable_sort(rep.begin(), rep.end(), [](const Marker* a, const Marker* b) {
        if (a->position != b->position)
            return a->position < b->position;
        return a->kind == MarkerKind::RepeatEnd && b->kind == MarkerKind::RepeatStart;
    });

    std::vector<RepeatSection> sections;
    std::optional<int> open;
    for (const Marker* m : rep) {
        if (m->kind == MarkerKind::RepeatStart) {
            if (open)
                throw ValidationError("nested repeat start" + at_boundary(m->position));
            open = m->position;
        } else {
            int start;
            if (open) {
                start = *open;
                open.reset();
            } else {
                // Bare repeat end: conventionally repeat from the beginning.
                if (!sections.empty())
                    throw ValidationError("repeat end without matching start" +
                                          at_boundary(m->position));
                start = 0;
            }
            if (m->position <= start)
                throw ValidationError("empty repeat section" + at_boundary(m->position));
            sections.push_back({start, m->position});
        }
    }
    if (open)
        throw ValidationError("repeat start without matching end" + at_boundary(*open));
    return sections;
}

std::vector<VoltaBracket> collect_brackets(const Score& score) {
    std::vector<const Marker*> volta;
    for (const Marker& m : score.markers)
        if (m.kind == MarkerKind::VoltaStart || m.kind == MarkerKind::VoltaEnd)
            volta.push_back(&m);
    std::stable_sort(volta.begin(), volta.end(), [](const Marker* a, const Marker* b) {
        if (a->position != b->position)
            return a->position < b->position;
        return a->kind == MarkerKind::VoltaEnd && b->kind == MarkerKind::VoltaStart;
    });

    std::vector<VoltaBracket> brackets;
    std::optional<VoltaBracket> open;
    for (const Marker* m : volta) {
        if (m->kind == MarkerKind::VoltaStart) {
            if (open)
                throw ValidationError("overlapping volta brackets" + at_boundary(m->position));
            if (m->number < 1)
                throw ValidationError("volta number must be positive" + at_boundary(m->position));
            open = VoltaBracket{m->number, m->position, -1};
        } else {
            if (!open)
                throw ValidationError("volta end without matching start" + at_boundary(m->position));
            if (m->position <= open->begin)
                throw ValidationError("empty volta bracket" + at_boundary(m->position));
            open->end = m->position;
            brackets.push_back(*open);
            open.reset();
        }
    }
    if (open)
        throw ValidationError("volta start without matching end" + at_boundary(open->begin));
    return brackets;
}

std::vector<VoltaGroup> group_brackets(std::vector<VoltaBracket> brackets,
                                       const std::vector<RepeatSection>& repeats) {
    std::sort(brackets.begin(), brackets.end(),
              [](const VoltaBracket& a, const VoltaBracket& b) { return a.begin < b.begin; });

    std::vector<VoltaGroup> groups;
    for (const VoltaBracket& b : brackets) {
        if (!groups.empty() && groups.back().brackets.back().end == b.begin)
            groups.back().brackets.push_back(b);
        else
            groups.push_back(VoltaGroup{{b}, -1});
    }

    for (VoltaGroup& g : groups) {
        for (std::size_t i = 0; i < g.brackets.size(); ++i) {
            if (g.brackets[i].number != static_cast<int>(i) + 1)
                throw ValidationError("volta bracket numbers must run 1, 2, ..." +
                                      at_boundary(g.brackets[i].begin));
        }
        if (g.brackets.size() > 2)
            throw ValidationError("more than two volta brackets in one group" +
                                  at_boundary(g.brackets.front().begin));

        // The first bracket closes exactly where its repeat section ends.
        int attach = g.brackets.front().end;
        for (std::size_t r = 0; r < repeats.size(); ++r) {
            if (repeats[r].end == attach) {
                if (g.brackets.front().begin < repeats[r].start)
                    throw ValidationError("volta bracket crosses its repeat start" +
                                          at_boundary(g.brackets.front().begin));
                g.repeat_index = static_cast<int>(r);
                break;
            }
        }
        if (g.repeat_index < 0)
            throw ValidationError("volta group not attached to a repeat" +
                                  at_boundary(g.brackets.front().begin));
    }
    return groups;
}

} // namespace

ScoreStructure analyze_score(const Score& score) {
    validate_onsets(score);
    const int n = static_cast<int>(score.onsets.size());

    for (const Marker& m : score.markers) {
        if (m.position < 0 || m.position > n)
            throw ValidationError(std::string(marker_kind_name(m.kind)) +
                                  " position out of range" + at_boundary(m.position));
    }

    ScoreStructure st;
    st.repeats = collect_repeats(score);
    st.volta_groups = group_brackets(collect_brackets(score), st.repeats);

    for (const Marker& m : score.markers) {
        switch (m.kind) {
        case MarkerKind::Segno:
            if (st.segno_boundary >= 0)
                throw ValidationError("multiple Segno markers" + at_boundary(m.position));
            st.segno_boundary = m.position;
            break;
        case MarkerKind::Fine:
            if (st.fine_boundary >= 0)
                throw ValidationError("multiple Fine markers" + at_boundary(m.position));
            st.fine_boundary = m.position;
            break;
        case MarkerKind::CodaSign:
            if (st.coda_boundary >= 0)
                throw ValidationError("multiple CodaSign markers" + at_boundary(m.position));
            st.coda_boundary = m.position;
            break;
        case MarkerKind::ToCoda:
            if (st.tocoda_boundary >= 0)
                throw ValidationError("multiple ToCoda markers" + at_boundary(m.position));
            st.tocoda_boundary = m.position;
            break;
        case MarkerKind::DaCapoAlFine:
        case MarkerKind::DaCapoAlCoda:
        case MarkerKind::DalSegnoAlFine:
        case MarkerKind::DalSegnoAlCoda:
            st.jumps.push_back({m.kind, m.position});
            break;
        default:
            break;
        }
    }

    if (st.jumps.size() > 1)
        throw ValidationError("more than one da capo / dal segno marker" +
                              at_boundary(st.jumps[1].position));

    for (const NavigationJump& j : st.jumps) {
        const bool dal_segno = j.kind == MarkerKind::DalSegnoAlFine ||
                               j.kind == MarkerKind::DalSegnoAlCoda;
        const bool al_coda = j.kind == MarkerKind::DaCapoAlCoda ||
                             j.kind == MarkerKind::DalSegnoAlCoda;
        int origin = 0;
        if (dal_segno) {
            if (st.segno_boundary < 0)
                throw ValidationError(std::string(marker_kind_name(j.kind)) +
                                      " without a Segno" + at_boundary(j.position));
            if (st.segno_boundary >= j.position)
                throw ValidationError("Segno must precede its dal segno marker" +
                                      at_boundary(st.segno_boundary));
            origin = st.segno_boundary;
        }
        if (al_coda) {
            if (st.coda_boundary < 0)
                throw ValidationError(std::string(marker_kind_name(j.kind)) +
                                      " without a CodaSign" + at_boundary(j.position));
            if (st.tocoda_boundary < 0)
                throw ValidationError(std::string(marker_kind_name(j.kind)) +
                                      " without a ToCoda" + at_boundary(j.position));
            if (st.tocoda_boundary <= origin)
                throw ValidationError("ToCoda must lie after the jump target" +
                                      at_boundary(st.tocoda_boundary));
        } else {
            if (st.fine_boundary < 0)
                throw ValidationError(std::string(marker_kind_name(j.kind)) +
                                      " without a Fine" + at_boundary(j.position));
            if (st.fine_boundary <= origin)
                throw ValidationError("Fine must lie after the jump target" +
                                      at_boundary(st.fine_boundary));
        }
    }

    // Every marker position splits the onset range.
    std::set<int> bounds{0, n};
    for (const Marker& m : score.markers)
        bounds.insert(m.position);
    st.boundaries.assign(bounds.begin(), bounds.end());

    for (std::size_t i = 0; i + 1 < st.boundaries.size(); ++i) {
        Segment seg;
        seg.label = segment_label(static_cast<int>(st.segments.size()));
        seg.start = st.boundaries[i];
        seg.end = st.boundaries[i + 1] - 1;
        st.segments.push_back(std::move(seg));
    }
    return st;
}

std::vector<Segment> segment_score(const Score& score) {
    return analyze_score(score).segments;
}

namespace {

// Walks the score boundary by boundary for one set of repeat decisions
// (1 = play once, 2 = play twice) and returns the played segment indices.
std::vector<int> simulate_playback(const ScoreStructure& st,
                                   const std::vector<int>& repeat_counts) {
    const int end_boundary = st.boundaries.back();
    std::vector<int> pass_index(st.repeats.size(), 1);
    bool post_jump = false;
    bool jump_taken = false;
    bool tocoda_taken = false;
    bool al_fine = false;
    bool al_coda = false;

    auto segment_at = [&st](int boundary) {
        auto it = std::lower_bound(st.boundaries.begin(), st.boundaries.end(), boundary);
        return static_cast<int>(it - st.boundaries.begin());
    };

    std::vector<int> played;
    int pos = 0;
    for (;;) {
        bool moved = true;
        while (moved) {
            moved = false;

            // Repeat ends fire before anything else at the same boundary.
            for (std::size_t r = 0; r < st.repeats.size(); ++r) {
                if (st.repeats[r].end == pos && !post_jump &&
                    pass_index[r] < repeat_counts[r]) {
                    ++pass_index[r];
                    pos = st.repeats[r].start;
                    moved = true;
                    break;
                }
            }
            if (moved)
                continue;

            if (post_jump && al_fine && st.fine_boundary == pos)
                return played;

            if (post_jump && al_coda && !tocoda_taken && st.tocoda_boundary == pos) {
                tocoda_taken = true;
                pos = st.coda_boundary;
                moved = true;
                continue;
            }

            if (!jump_taken && !st.jumps.empty() && st.jumps.front().position == pos) {
                jump_taken = true;
                post_jump = true;
                const MarkerKind k = st.jumps.front().kind;
                al_fine = k == MarkerKind::DaCapoAlFine || k == MarkerKind::DalSegnoAlFine;
                al_coda = !al_fine;
                const bool dal_segno = k == MarkerKind::DalSegnoAlFine ||
                                       k == MarkerKind::DalSegnoAlCoda;
                pos = dal_segno ? st.segno_boundary : 0;
                moved = true;
                continue;
            }

            // Volta bracket starting here: play it only if its ending number
            // is due on this pass. The final pass takes the bracket sitting
            // past the repeat end (the final ending); a lone first ending is
            // skipped outright.
            for (const VoltaGroup& g : st.volta_groups) {
                for (std::size_t bi = 0; bi < g.brackets.size(); ++bi) {
                    const VoltaBracket& b = g.brackets[bi];
                    if (b.begin != pos)
                        continue;
                    const int r = g.repeat_index;
                    const bool final_pass =
                        post_jump || pass_index[r] >= repeat_counts[r];
                    const bool play = final_pass
                                          ? b.begin >= st.repeats[r].end
                                          : b.number == pass_index[r];
                    if (!play) {
                        pos = b.end;
                        moved = true;
                    }
                    break;
                }
                if (moved)
                    break;
            }
        }

        if (pos >= end_boundary)
            return played;
        played.push_back(segment_at(pos));
        pos = st.boundaries[segment_at(pos) + 1];
    }
}

} // namespace

std::vector<StructuralVersion> enumerate_versions(const Score& score, int limit) {
    if (limit < 1)
        throw ValidationError("version limit must be positive");
    const ScoreStructure st = analyze_score(score);
    const std::size_t k = st.repeats.size();

    std::vector<StructuralVersion> versions;
    auto emit = [&](const std::vector<int>& decisions) {
        StructuralVersion v;
        v.segment_refs = simulate_playback(st, decisions);
        for (int ref : v.segment_refs)
            v.structure += st.segments[ref].label;
        versions.push_back(std::move(v));
        return static_cast<int>(versions.size()) < limit;
    };

    // Pruning order: the all-repeats and no-repeats versions first, then by
    // the number of repeat decisions flipped from all-repeats, ties in
    // lexicographic decision-vector order.
    if (k == 0) {
        emit({});
        return versions;
    }
    if (!emit(std::vector<int>(k, 2)))
        return versions;
    if (!emit(std::vector<int>(k, 1)))
        return versions;
    for (std::size_t flips = 1; flips < k; ++flips) {
        // Flip-position combinations in lexicographic order.
        std::vector<std::size_t> idx(flips);
        for (std::size_t i = 0; i < flips; ++i)
            idx[i] = i;
        for (;;) {
            std::vector<int> d(k, 2);
            for (std::size_t i : idx)
                d[i] = 1;
            if (!emit(d))
                return versions;
            std::size_t i = flips;
            while (i > 0 && idx[i - 1] == k - flips + (i - 1))
                --i;
            if (i == 0)
                break;
            ++idx[i - 1];
            for (std::size_t j = i; j < flips; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    }
    return versions;
}

std::vector<int> unfold(const std::vector<Segment>& segments,
                        const StructuralVersion& version) {
    std::vector<int> indices;
    for (int ref : version.segment_refs) {
        if (ref < 0 || ref >= static_cast<int>(segments.size()))
            throw ValidationError("version references segment " + std::to_string(ref) +
                                  " outside the segmentation");
        for (int i = segments[ref].start; i <= segments[ref].end; ++i)
            indices.push_back(i);
    }
    return indices;
}

std::vector<int> parse_structure(const std::vector<Segment>& segments,
                                 const std::string& structure) {
    std::vector<int> refs;
    std::size_t pos = 0;
    while (pos < structure.size()) {
        int best = -1;
        std::size_t best_len = 0;
        for (std::size_t s = 0; s < segments.size(); ++s) {
            const std::string& label = segments[s].label;
            if (label.size() > best_len && structure.compare(pos, label.size(), label) == 0) {
                best = static_cast<int>(s);
                best_len = label.size();
            }
        }
        if (best < 0)
            throw ValidationError("structure string '" + structure +
                                  "' does not parse at position " + std::to_string(pos));
        refs.push_back(best);
        pos += best_len;
    }
    if (refs.empty())
        throw ValidationError("structure string is empty");
    return refs;
}

namespace {

using nlohmann::json;

MarkerKind marker_kind_from_name(const std::string& name) {
    static const std::pair<const char*, MarkerKind> table[] = {
        {"RepeatStart", MarkerKind::RepeatStart},
        {"RepeatEnd", MarkerKind::RepeatEnd},
        {"VoltaStart", MarkerKind::VoltaStart},
        {"VoltaEnd", MarkerKind::VoltaEnd},
        {"Segno", MarkerKind::Segno},
        {"Fine", MarkerKind::Fine},
        {"CodaSign", MarkerKind::CodaSign},
        {"ToCoda", MarkerKind::ToCoda},
        {"DaCapoAlFine", MarkerKind::DaCapoAlFine},
        {"DaCapoAlCoda", MarkerKind::DaCapoAlCoda},
        {"DalSegnoAlFine", MarkerKind::DalSegnoAlFine},
        {"DalSegnoAlCoda", MarkerKind::DalSegnoAlCoda},
    };
    for (const auto& [n, k] : table)
        if (name == n)
            return k;
    throw ValidationError("unknown marker kind '" + name + "'");
}

} // namespace

Score score_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("score JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ValidationError("score JSON: top level must be an object");
    if (!doc.contains("name") || !doc["name"].is_string())
        throw ValidationError("score JSON: missing string field 'name'");
    if (!doc.contains("onsets") || !doc["onsets"].is_array())
        throw ValidationError("score JSON: missing array field 'onsets'");

    Score score;
    score.name = doc["name"].get<std::string>();

    for (const json& entry : doc["onsets"]) {
        if (!entry.is_array() || entry.empty())
            throw ValidationError("score JSON: field 'onsets' entries must be non-empty arrays");
        ScoreOnset onset;
        for (const json& p : entry) {
            if (!p.is_number_integer())
                throw ValidationError("score JSON: field 'onsets' pitches must be integers");
            const int pitch = p.get<int>();
            if (pitch < 0 || pitch > 127)
                throw ValidationError("score JSON: pitch " + std::to_string(pitch) +
                                      " outside 0..127 in field 'onsets'");
            onset.pitches.push_back(static_cast<std::uint8_t>(pitch));
        }
        std::sort(onset.pitches.begin(), onset.pitches.end());
        onset.pitches.erase(std::unique(onset.pitches.begin(), onset.pitches.end()),
                            onset.pitches.end());
        score.onsets.push_back(std::move(onset));
    }

    if (doc.contains("markers")) {
        if (!doc["markers"].is_array())
            throw ValidationError("score JSON: field 'markers' must be an array");
        for (const json& entry : doc["markers"]) {
            if (!entry.is_object())
                throw ValidationError("score JSON: field 'markers' entries must be objects");
            if (!entry.contains("kind") || !entry["kind"].is_string())
                throw ValidationError("score JSON: marker missing string field 'kind'");
            if (!entry.contains("position") || !entry["position"].is_number_integer())
                throw ValidationError("score JSON: marker missing integer field 'position'");
            Marker m;
            m.kind = marker_kind_from_name(entry["kind"].get<std::string>());
            m.position = entry["position"].get<int>();
            if (m.kind == MarkerKind::VoltaStart) {
                if (!entry.contains("number") || !entry["number"].is_number_integer())
                    throw ValidationError("score JSON: VoltaStart missing integer field 'number'");
                m.number = entry["number"].get<int>();
            } else if (entry.contains("number")) {
                throw ValidationError("score JSON: field 'number' only valid on VoltaStart");
            }
            for (const auto& [key, value] : entry.items()) {
                (void)value;
                if (key != "kind" && key != "position" && key != "number")
                    throw ValidationError("score JSON: unknown marker field '" + key + "'");
            }
            score.markers.push_back(m);
        }
    }
    return score;
}

Score load_score_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open score file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return score_from_json(buffer.str());
}

std::string score_to_json(const Score& score) {
    nlohmann::ordered_json doc;
    doc["name"] = score.name;
    doc["onsets"] = nlohmann::ordered_json::array();
    for (const ScoreOnset& onset : score.onsets) {
        nlohmann::ordered_json pitches = nlohmann::ordered_json::array();
        for (std::uint8_t p : onset.pitches)
            pitches.push_back(static_cast<int>(p));
        doc["onsets"].push_back(std::move(pitches));
    }
    doc["markers"] = nlohmann::ordered_json::array();
    for (const Marker& m : score.markers) {
        nlohmann::ordered_json entry;
        entry["kind"] = marker_kind_name(m.kind);
        entry["position"] = m.position;
        if (m.kind == MarkerKind::VoltaStart)
            entry["number"] = m.number;
        doc["markers"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

} // namespace refrain
