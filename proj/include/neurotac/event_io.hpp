#pragma once

// Serialization for event streams, samples and datasets.
//
// Event file layout (little-endian):
//   magic "NTEV" | u16 version = 1 | u16 reserved | u64 record count
//   record: u32 t_us | u16 x | u16 y | u8 polarity | u8 reserved   (10 bytes)
//
// Samples and datasets are JSON documents.

#include "neurotac/error.hpp"
#include "neurotac/types.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace neurotac {

inline constexpr std::array<char, 4> kEventMagic = {'N', 'T', 'E', 'V'};
inline constexpr std::uint16_t kEventFormatVersion = 1;
inline constexpr std::size_t kEventHeaderSize = 16;
inline constexpr std::size_t kEventRecordSize = 10;

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu));
    }
}

template <typename T>
T get_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return static_cast<T>(v);
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string read_file_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

inline void require_sorted(std::span<const PixelEvent> events) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].t < events[i - 1].t) {
            throw PreconditionError("events are not sorted by timestamp at index " + std::to_string(i));
        }
    }
}

inline std::vector<std::uint8_t> encode_events(std::span<const PixelEvent> events) {
    require_sorted(events);
    std::vector<std::uint8_t> out;
    out.reserve(kEventHeaderSize + kEventRecordSize * events.size());
    out.insert(out.end(), kEventMagic.begin(), kEventMagic.end());
    detail::put_le<std::uint16_t>(out, kEventFormatVersion);
    detail::put_le<std::uint16_t>(out, 0);
    detail::put_le<std::uint64_t>(out, events.size());
    for (const auto& e : events) {
        detail::put_le<std::uint32_t>(out, e.t);
        detail::put_le<std::uint16_t>(out, e.x);
        detail::put_le<std::uint16_t>(out, e.y);
        detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.polarity));
        detail::put_le<std::uint8_t>(out, 0);
    }
    return out;
}

inline std::vector<PixelEvent> decode_events(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kEventHeaderSize) throw FormatError("event file shorter than its 16-byte header");
    if (std::memcmp(bytes.data(), kEventMagic.data(), kEventMagic.size()) != 0) {
        throw FormatError("bad magic, expected NTEV");
    }
    const auto version = detail::get_le<std::uint16_t>(bytes.data() + 4);
    if (version != kEventFormatVersion) throw FormatError("unsupported event format version " + std::to_string(version));
    const auto count = detail::get_le<std::uint64_t>(bytes.data() + 8);
    const std::size_t body = bytes.size() - kEventHeaderSize;
    if (body % kEventRecordSize != 0 || body / kEventRecordSize != count) {
        throw FormatError("header declares " + std::to_string(count) + " records but file holds " +
                          std::to_string(body) + " payload bytes");
    }

    std::vector<PixelEvent> events;
    events.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t* r = bytes.data() + kEventHeaderSize + i * kEventRecordSize;
        PixelEvent e;
        e.t = detail::get_le<std::uint32_t>(r);
        e.x = detail::get_le<std::uint16_t>(r + 4);
        e.y = detail::get_le<std::uint16_t>(r + 6);
        const auto pol = r[8];
        if (!in_bounds(e)) {
            throw ValidationError("record " + std::to_string(i) + ": pixel (" + std::to_string(e.x) + ", " +
                                  std::to_string(e.y) + ") outside the 240x180 sensor");
        }
        if (pol > 1) throw ValidationError("record " + std::to_string(i) + ": invalid polarity byte");
        e.polarity = static_cast<Polarity>(pol);
        if (!events.empty() && e.t < events.back().t) {
            throw ValidationError("record " + std::to_string(i) + ": timestamp goes backwards");
        }
        events.push_back(e);
    }
    return events;
}

inline void write_events(std::span<const PixelEvent> events, const std::filesystem::path& path) {
    const auto bytes = encode_events(events);
    detail::write_file_bytes(path, bytes);
}

inline std::vector<PixelEvent> read_events(const std::filesystem::path& path) {
    const auto bytes = detail::read_file_bytes(path);
    return decode_events(bytes);
}

// CSV escape hatch: header `t_us,x,y,polarity`, polarity written as 1/0.
inline void write_events_csv(std::span<const PixelEvent> events, const std::filesystem::path& path) {
    require_sorted(events);
    std::ostringstream os;
    os << "t_us,x,y,polarity\n";
    for (const auto& e : events) {
        os << e.t << ',' << e.x << ',' << e.y << ',' << static_cast<int>(e.polarity) << '\n';
    }
    detail::write_file_text(path, os.str());
}

inline std::vector<PixelEvent> read_events_csv(const std::filesystem::path& path) {
    std::istringstream in(detail::read_file_text(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_us,x,y,polarity", 0) != 0) {
        throw FormatError("CSV event file must start with header t_us,x,y,polarity");
    }
    std::vector<PixelEvent> events;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        long long t = 0, x = 0, y = 0;
        std::string pol;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(row >> t >> c1 >> x >> c2 >> y >> c3 >> pol) || c1 != ',' || c2 != ',' || c3 != ',') {
            throw FormatError("CSV record " + std::to_string(index) + " is malformed");
        }
        if (!pol.empty() && pol.back() == '\r') pol.pop_back();
        if (t < 0 || t > 0xffffffffLL) throw ValidationError("record " + std::to_string(index) + ": timestamp out of range");
        if (x < 0 || x >= kSensorWidth || y < 0 || y >= kSensorHeight) {
            throw ValidationError("record " + std::to_string(index) + ": pixel outside the 240x180 sensor");
        }
        PixelEvent e{static_cast<std::uint32_t>(t), static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                     Polarity::on};
        if (pol == "1" || pol == "on") {
            e.polarity = Polarity::on;
        } else if (pol == "0" || pol == "off") {
            e.polarity = Polarity::off;
        } else {
            throw ValidationError("record " + std::to_string(index) + ": invalid polarity '" + pol + "'");
        }
        if (!events.empty() && e.t < events.back().t) {
            throw ValidationError("record " + std::to_string(index) + ": timestamp goes backwards");
        }
        events.push_back(e);
        ++index;
    }
    return events;
}

// ---- samples and datasets -------------------------------------------------

inline nlohmann::json sample_to_json(const Sample& s) {
    nlohmann::json trains = nlohmann::json::array();
    for (const auto& tr : s.trains) trains.push_back(tr);
    return {{"label", s.label}, {"duration_us", s.duration}, {"trains", std::move(trains)}};
}

inline Sample sample_from_json(const nlohmann::json& j) {
    Sample s;
    try {
        s.label = j.at("label").get<std::string>();
        s.duration = j.at("duration_us").get<TimeUs>();
        s.trains = j.at("trains").get<std::vector<SpikeTrain>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed sample: ") + e.what());
    }
    validate(s);
    return s;
}

inline void write_sample(const Sample& s, const std::filesystem::path& path) {
    validate(s);
    detail::write_file_text(path, sample_to_json(s).dump() + "\n");
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(detail::read_file_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline Sample read_sample(const std::filesystem::path& path) { return sample_from_json(parse_json_file(path)); }

inline nlohmann::json dataset_to_json(const Dataset& d) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : d.samples) samples.push_back(sample_to_json(s));
    return {{"classes", d.classes}, {"samples", std::move(samples)}};
}

inline Dataset dataset_from_json(const nlohmann::json& j) {
    Dataset d;
    try {
        d.classes = j.at("classes").get<std::vector<std::string>>();
        for (const auto& s : j.at("samples")) d.samples.push_back(sample_from_json(s));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed dataset: ") + e.what());
    }
    validate(d);
    return d;
}

inline void write_dataset(const Dataset& d, const std::filesystem::path& path) {
    detail::write_file_text(path, dataset_to_json(d).dump() + "\n");
}

inline Dataset read_dataset(const std::filesystem::path& path) { return dataset_from_json(parse_json_file(path)); }

}  // namespace neurotac
