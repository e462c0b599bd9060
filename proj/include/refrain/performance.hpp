#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace refrain {

struct PerformanceNote {
    double onset_time = 0.0; // seconds
    int pitch = 0;
};

// Flat performed pitch sequence, the alignment's row axis.
struct Performance {
    std::vector<std::uint8_t> pitches;
    std::string source;

    std::size_t size() const { return pitches.size(); }
};

// Extracts one note per note-on (velocity > 0) from a format 0/1 Standard
// MIDI File, onset times in seconds via the file's tempo map. All channels
// are merged; note-offs, pedals, and program changes are ignored.
// Throws ParseError (with byte offset) or UnsupportedFormatError (format 2).
std::vector<PerformanceNote> load_midi(std::span<const std::uint8_t> bytes);

// Sorts by (onset_time, pitch), equal keys keeping input order, and strips
// the times. The result is the performed pitch array.
Performance to_pitch_sequence(const std::vector<PerformanceNote>& notes,
                              std::string source = {});

// Performance JSON:
//   {"source": string, "notes": [{"onset_time": number, "pitch": int}, ...]}
std::vector<PerformanceNote> performance_notes_from_json(const std::string& text,
                                                         std::string* source_out = nullptr);

// Loads a .mid/.json performance file; MIDI is detected by the MThd magic,
// anything else is parsed as Performance JSON. source defaults to the file
// name for MIDI input.
Performance load_performance_file(const std::string& path);

// Writes Performance JSON, one note per pitch at a fixed note spacing.
std::string performance_to_json(const Performance& performance,
                                double seconds_per_note = 0.5);

} // namespace refrain
