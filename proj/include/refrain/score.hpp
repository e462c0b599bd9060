#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace refrain {

// A unique score onset: the set of MIDI pitches sounding together at one
// score time. Pitches are kept sorted and deduplicated.
struct ScoreOnset {
    std::vector<std::uint8_t> pitches;

    bool contains(int pitch) const;
};

enum class MarkerKind {
    RepeatStart,
    RepeatEnd,
    VoltaStart,
    VoltaEnd,
    Segno,
    Fine,
    CodaSign,
    ToCoda,
    DaCapoAlFine,
    DaCapoAlCoda,
    DalSegnoAlFine,
    DalSegnoAlCoda,
};

const char* marker_kind_name(MarkerKind kind);

// A structural marker sitting on a boundary between onsets: position p means
// "between onset p-1 and onset p", so valid positions are 0..onset count.
struct Marker {
    MarkerKind kind;
    int position = 0;
    int number = 0; // volta ending number, VoltaStart only
};

struct Score {
    std::string name;
    std::vector<ScoreOnset> onsets;
    std::vector<Marker> markers;
};

// Maximal contiguous onset range delimited by marker boundaries.
// start/end are inclusive onset indices.
struct Segment {
    std::string label;
    int start = 0;
    int end = 0;

    int length() const { return end - start + 1; }
};

// One musically valid unfolding: the segments in performance order.
// structure is the concatenation of the referenced segment labels.
struct StructuralVersion {
    std::vector<int> segment_refs;
    std::string structure;
};

// A repeated section [start, end) in boundary coordinates.
struct RepeatSection {
    int start = 0;
    int end = 0;
};

struct VoltaBracket {
    int number = 0;
    int begin = 0; // boundary, inclusive
    int end = 0;   // boundary, exclusive
};

// A chain of adjacent volta brackets attached to one repeat section.
struct VoltaGroup {
    std::vector<VoltaBracket> brackets;
    int repeat_index = -1;
};

struct NavigationJump {
    MarkerKind kind = MarkerKind::DaCapoAlFine;
    int position = 0;
};

// Validated digest of a score's marker layout, plus its segmentation.
struct ScoreStructure {
    std::vector<int> boundaries; // sorted, includes 0 and onset count
    std::vector<Segment> segments;
    std::vector<RepeatSection> repeats; // score order
    std::vector<VoltaGroup> volta_groups;
    std::vector<NavigationJump> jumps; // at most one
    int segno_boundary = -1;
    int fine_boundary = -1;
    int coda_boundary = -1;
    int tocoda_boundary = -1;
};

inline constexpr int kDefaultVersionLimit = 64;

// Segment label for a 0-based index: A..Z, then AA, AB, ...
std::string segment_label(int index);

// Validates the marker layout and computes the segmentation.
// Throws ValidationError naming the offending boundary on malformed input.
ScoreStructure analyze_score(const Score& score);

// The segmentation alone: every marker position is a segment boundary,
// labels assigned alphabetically in score order.
std::vector<Segment> segment_score(const Score& score);

// All musically valid structural versions, each repeat played once or twice,
// navigation jumps taken exactly once with repeats ignored after the jump.
// When more than `limit` versions exist, the first `limit` are returned:
// all-repeats first, then no-repeats, then increasing number of repeat
// decisions flipped from all-repeats, ties in score order.
std::vector<StructuralVersion> enumerate_versions(const Score& score,
                                                  int limit = kDefaultVersionLimit);

// Onset indices of a version in performance order.
std::vector<int> unfold(const std::vector<Segment>& segments,
                        const StructuralVersion& version);

// Parses a structure string like "ABB" against a segmentation
// (greedy longest label match). Throws ValidationError if it does not parse.
std::vector<int> parse_structure(const std::vector<Segment>& segments,
                                 const std::string& structure);

// Score JSON:
//   {"name": string,
//    "onsets": [[int, ...], ...],
//    "markers": [{"kind": string, "position": int, "number": int?}, ...]}
Score score_from_json(const std::string& text);
Score load_score_file(const std::string& path);
std::string score_to_json(const Score& score);

} // namespace refrain
