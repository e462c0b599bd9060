#include "refrain/performance.hpp"

#include "refrain/errors.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace refrain {

namespace {

// Cursor over SMF bytes; every read checks bounds and reports the offset.
class SmfReader {
public:
    explicit SmfReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }

    std::uint8_t peek() const {
        if (pos_ >= bytes_.size())
            throw ParseError("unexpected end of MIDI data", pos_);
        return bytes_[pos_];
    }

    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] << 8 | bytes_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v = v << 8 | bytes_[pos_ + i];
        pos_ += 4;
        return v;
    }

    std::uint32_t varint() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            std::uint8_t b = u8();
            v = v << 7 | (b & 0x7f);
            if (!(b & 0x80))
                return v;
        }
        throw ParseError("variable-length quantity longer than 4 bytes", pos_);
    }

    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }

    void expect_chunk(const char* tag) {
        need(4);
        if (std::memcmp(bytes_.data() + pos_, tag, 4) != 0)
            throw ParseError(std::string("expected '") + tag + "' chunk", pos_);
        pos_ += 4;
    }

private:
    void need(std::size_t n) const {
        if (remaining() < n)
            throw ParseError("unexpected end of MIDI data", bytes_.size());
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

struct RawNote {
    std::uint64_t tick;
    int pitch;
};

struct TempoChange {
    std::uint64_t tick;
    std::uint32_t us_per_quarter;
};

// Piecewise-linear tick -> seconds conversion.
double tick_to_seconds(std::uint64_t tick, const std::vector<TempoChange>& tempos,
                       int ticks_per_quarter) {
    double seconds = 0.0;
    std::uint64_t prev_tick = 0;
    std::uint32_t us = 500000; // MIDI default, 120 bpm
    for (const TempoChange& t : tempos) {
        if (t.tick >= tick)
            break;
        seconds += static_cast<double>(t.tick - prev_tick) * us / (1e6 * ticks_per_quarter);
        prev_tick = t.tick;
        us = t.us_per_quarter;
    }
    seconds += static_cast<double>(tick - prev_tick) * us / (1e6 * ticks_per_quarter);
    return seconds;
}

} // namespace

std::vector<PerformanceNote> load_midi(std::span<const std::uint8_t> bytes) {
    SmfReader in(bytes);

    in.expect_chunk("MThd");
    const std::uint32_t header_len = in.u32();
    if (header_len < 6)
        throw ParseError("MThd chunk shorter than 6 bytes", in.pos());
    const std::uint16_t format = in.u16();
    const std::uint16_t track_count = in.u16();
    const std::uint16_t division = in.u16();
    in.skip(header_len - 6);

    if (format == 2)
        throw UnsupportedFormatError("SMF format 2 is not supported");
    if (format > 2)
        throw ParseError("unknown SMF format " + std::to_string(format), in.pos());

    // division: bit 15 clear = ticks per quarter note, set = SMPTE.
    const bool smpte = (division & 0x8000) != 0;
    double smpte_ticks_per_second = 0.0;
    int ticks_per_quarter = 0;
    if (smpte) {
        const int fps_code = -static_cast<std::int8_t>(division >> 8);
        const int ticks_per_frame = division & 0xff;
        if (ticks_per_frame == 0)
            throw ParseError("SMPTE division with zero ticks per frame", in.pos());
        const double fps = fps_code == 29 ? 29.97 : static_cast<double>(fps_code);
        if (fps <= 0.0)
            throw ParseError("invalid SMPTE frame rate", in.pos());
        smpte_ticks_per_second = fps * ticks_per_frame;
    } else {
        ticks_per_quarter = division & 0x7fff;
        if (ticks_per_quarter == 0)
            throw ParseError("division of zero ticks per quarter note", in.pos());
    }

    std::vector<RawNote> notes;
    std::vector<TempoChange> tempos;

    for (std::uint16_t t = 0; t < track_count; ++t) {
        in.expect_chunk("MTrk");
        const std::uint32_t track_len = in.u32();
        if (track_len > in.remaining())
            throw ParseError("track length exceeds file size", in.pos());
        const std::size_t track_end = in.pos() + track_len;

        std::uint64_t tick = 0;
        std::uint8_t running_status = 0;
        bool ended = false;
        while (in.pos() < track_end && !ended) {
            tick += in.varint();
            std::uint8_t status = in.peek();
            if (status & 0x80) {
                in.u8();
                if (status < 0xf0)
                    running_status = status;
            } else {
                if (running_status == 0)
                    throw ParseError("data byte without running status", in.pos());
                status = running_status;
            }

            if (status == 0xff) { // meta
                const std::uint8_t type = in.u8();
                const std::uint32_t len = in.varint();
                const std::size_t data_at = in.pos();
                if (type == 0x2f) {
                    ended = true;
                    in.skip(len);
                } else if (type == 0x51) {
                    if (len != 3)
                        throw ParseError("set-tempo meta event must carry 3 bytes", data_at);
                    std::uint32_t us = 0;
                    for (int i = 0; i < 3; ++i)
                        us = us << 8 | in.u8();
                    tempos.push_back({tick, us});
                } else {
                    in.skip(len);
                }
                running_status = 0;
            } else if (status == 0xf0 || status == 0xf7) { // sysex
                in.skip(in.varint());
                running_status = 0;
            } else if (status >= 0xf0) {
                throw ParseError("unexpected system message in file", in.pos());
            } else {
                const std::uint8_t hi = status & 0xf0;
                const std::uint8_t d1 = in.u8();
                if (d1 & 0x80)
                    throw ParseError("event data byte has high bit set", in.pos() - 1);
                if (hi == 0xc0 || hi == 0xd0) {
                    // program change / channel pressure: one data byte, ignored
                } else {
                    const std::uint8_t d2 = in.u8();
                    if (d2 & 0x80)
                        throw ParseError("event data byte has high bit set", in.pos() - 1);
                    if (hi == 0x90 && d2 > 0)
                        notes.push_back({tick, d1});
                }
            }
        }
        if (in.pos() != track_end)
            throw ParseError("track data does not match declared length", in.pos());
    }

    std::sort(tempos.begin(), tempos.end(),
              [](const TempoChange& a, const TempoChange& b) { return a.tick < b.tick; });

    std::vector<PerformanceNote> out;
    out.reserve(notes.size());
    for (const RawNote& n : notes) {
        double seconds = smpte ? static_cast<double>(n.tick) / smpte_ticks_per_second
                               : tick_to_seconds(n.tick, tempos, ticks_per_quarter);
        out.push_back({seconds, n.pitch});
    }
    return out;
}

Performance to_pitch_sequence(const std::vector<PerformanceNote>& notes, std::string source) {
    std::vector<PerformanceNote> sorted = notes;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const PerformanceNote& a, const PerformanceNote& b) {
                         if (a.onset_time != b.onset_time)
                             return a.onset_time < b.onset_time;
                         return a.pitch < b.pitch;
                     });
    Performance p;
    p.source = std::move(source);
    p.pitches.reserve(sorted.size());
    for (const PerformanceNote& n : sorted)
        p.pitches.push_back(static_cast<std::uint8_t>(n.pitch));
    return p;
}

std::vector<PerformanceNote> performance_notes_from_json(const std::string& text,
                                                         std::string* source_out) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("performance JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ValidationError("performance JSON: top level must be an object");
    if (!doc.contains("source") || !doc["source"].is_string())
        throw ValidationError("performance JSON: missing string field 'source'");
    if (!doc.contains("notes") || !doc["notes"].is_array())
        throw ValidationError("performance JSON: missing array field 'notes'");
    if (source_out)
        *source_out = doc["source"].get<std::string>();

    std::vector<PerformanceNote> notes;
    for (const json& entry : doc["notes"]) {
        if (!entry.is_object() || !entry.contains("onset_time") ||
            !entry["onset_time"].is_number() || !entry.contains("pitch") ||
            !entry["pitch"].is_number_integer())
            throw ValidationError("performance JSON: notes need 'onset_time' and integer 'pitch'");
        PerformanceNote n;
        n.onset_time = entry["onset_time"].get<double>();
        n.pitch = entry["pitch"].get<int>();
        if (n.pitch < 0 || n.pitch > 127)
            throw ValidationError("performance JSON: pitch " + std::to_string(n.pitch) +
                                  " outside 0..127");
        if (n.onset_time < 0.0)
            throw ValidationError("performance JSON: negative onset_time");
        notes.push_back(n);
    }
    return notes;
}

std::string performance_to_json(const Performance& performance, double seconds_per_note) {
    nlohmann::ordered_json doc;
    doc["source"] = performance.source;
    doc["notes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < performance.pitches.size(); ++i) {
        nlohmann::ordered_json note;
        note["onset_time"] = seconds_per_note * static_cast<double>(i);
        note["pitch"] = static_cast<int>(performance.pitches[i]);
        doc["notes"].push_back(std::move(note));
    }
    return doc.dump(2) + "\n";
}

Performance load_performance_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open performance file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    const std::string name = std::filesystem::path(path).filename().string();
    if (content.size() >= 4 && content.compare(0, 4, "MThd") == 0) {
        std::span<const std::uint8_t> bytes(
            reinterpret_cast<const std::uint8_t*>(content.data()), content.size());
        return to_pitch_sequence(load_midi(bytes), name);
    }
    std::string source;
    const auto notes = performance_notes_from_json(content, &source);
    return to_pitch_sequence(notes, source.empty() ? name : source);
}

} // namespace refrain
