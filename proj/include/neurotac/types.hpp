#pragma once

#include "neurotac/error.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace neurotac {

// DAVIS240 geometry and the number of pins in the tip.
inline constexpr int kSensorWidth = 240;
inline constexpr int kSensorHeight = 180;
inline constexpr std::size_t kTaxelCount = 49;

// All timestamps are integer microseconds.
using TimeUs = std::int64_t;

inline constexpr TimeUs kMicrosPerMilli = 1000;
inline constexpr TimeUs kMicrosPerSecond = 1'000'000;

constexpr TimeUs millis(double ms) { return static_cast<TimeUs>(ms * 1000.0 + (ms >= 0 ? 0.5 : -0.5)); }
constexpr double to_seconds(TimeUs t) { return static_cast<double>(t) * 1e-6; }

enum class Polarity : std::uint8_t { off = 0, on = 1 };

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline bool inside_image(Point2 p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < kSensorWidth && p.y < kSensorHeight;
}

// One address-event as produced by the camera.
struct PixelEvent {
    std::uint32_t t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    Polarity polarity = Polarity::on;

    friend bool operator==(const PixelEvent&, const PixelEvent&) = default;
};

inline bool in_bounds(const PixelEvent& e) { return e.x < kSensorWidth && e.y < kSensorHeight; }

// Pooled pixel events of one receptive field within one pooling window.
struct TaxelEvent {
    int taxel_id = 0;
    std::size_t count = 0;
    Point2 centroid;
    TimeUs t = 0;

    friend bool operator==(const TaxelEvent&, const TaxelEvent&) = default;
};

// Strictly increasing spike times of one taxel. The taxel id is the index of
// the train inside its Sample.
using SpikeTrain = std::vector<TimeUs>;

inline bool strictly_increasing(const SpikeTrain& train) {
    return std::adjacent_find(train.begin(), train.end(),
                              [](TimeUs a, TimeUs b) { return a >= b; }) == train.end();
}

// Multi-taxel spike train of one slide across a texture.
struct Sample {
    std::vector<SpikeTrain> trains = std::vector<SpikeTrain>(kTaxelCount);
    TimeUs duration = 0;
    std::string label;

    std::size_t spike_count() const {
        std::size_t n = 0;
        for (const auto& tr : trains) n += tr.size();
        return n;
    }

    friend bool operator==(const Sample&, const Sample&) = default;
};

inline void validate(const Sample& s) {
    if (s.trains.size() != kTaxelCount) {
        throw ValidationError("sample has " + std::to_string(s.trains.size()) + " trains, expected " +
                              std::to_string(kTaxelCount));
    }
    if (s.duration < 0) throw ValidationError("sample duration is negative");
    for (std::size_t n = 0; n < s.trains.size(); ++n) {
        const auto& tr = s.trains[n];
        if (!strictly_increasing(tr)) {
            throw ValidationError("train " + std::to_string(n) + " is not strictly increasing");
        }
        if (!tr.empty() && (tr.front() < 0 || tr.back() >= s.duration)) {
            throw ValidationError("train " + std::to_string(n) + " has a spike outside [0, duration)");
        }
    }
}

struct Dataset {
    std::vector<Sample> samples;
    std::vector<std::string> classes;

    // Index of a label in `classes`, or -1.
    int class_index(const std::string& label) const {
        auto it = std::find(classes.begin(), classes.end(), label);
        return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// `pooling_window` bounds how far sample durations may drift from each other.
inline void validate(const Dataset& d, TimeUs pooling_window = 20 * kMicrosPerMilli) {
    TimeUs lo = 0;
    TimeUs hi = 0;
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const auto& s = d.samples[i];
        validate(s);
        if (d.class_index(s.label) < 0) {
            throw ValidationError("sample " + std::to_string(i) + " has unknown label '" + s.label + "'");
        }
        lo = i == 0 ? s.duration : std::min(lo, s.duration);
        hi = i == 0 ? s.duration : std::max(hi, s.duration);
    }
    if (hi - lo > pooling_window) {
        throw ValidationError("sample durations differ by more than one pooling window");
    }
}

}  // namespace neurotac
