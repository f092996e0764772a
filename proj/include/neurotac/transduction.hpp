#pragma once

// Pixel events -> taxel spike trains: noise filtering, pooling into taxel
// events, and receptive-field re-centring, applied window by window.

#include "neurotac/error.hpp"
#include "neurotac/event_io.hpp"
#include "neurotac/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace neurotac {

struct ReceptiveField {
    int taxel_id = 0;
    Point2 center;
    double diameter = 6.0;

    bool contains(double x, double y) const {
        const double dx = x - center.x;
        const double dy = y - center.y;
        const double r = diameter / 2.0;
        return dx * dx + dy * dy <= r * r;
    }

    friend bool operator==(const ReceptiveField&, const ReceptiveField&) = default;
};

struct TransducerConfig {
    TimeUs noise_window = 5 * kMicrosPerMilli;
    int neighborhood_radius = 1;  // Chebyshev, 1 = 8-connected
    TimeUs pooling_window = 20 * kMicrosPerMilli;
    double rf_diameter = 6.0;
    double rf_update_gain = 0.5;

    void validate() const {
        if (noise_window <= 0) throw ParameterError("noise_window must be positive");
        if (pooling_window <= 0) throw ParameterError("pooling_window must be positive");
        if (neighborhood_radius < 0) throw ParameterError("neighborhood_radius must be non-negative");
        if (!(rf_diameter > 0)) throw ParameterError("rf_diameter must be positive");
        if (!(rf_update_gain >= 0.0 && rf_update_gain <= 1.0)) throw ParameterError("rf_update_gain must lie in [0, 1]");
    }
};

// One field per pin, ids in input order.
inline std::vector<ReceptiveField> make_fields(std::span<const Point2> centers, double diameter) {
    std::vector<ReceptiveField> fields;
    fields.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (!inside_image(centers[i])) throw ValidationError("receptive field center outside the image");
        fields.push_back({static_cast<int>(i), centers[i], diameter});
    }
    return fields;
}

// Field owning a pixel: nearest containing center, lowest taxel id on ties.
// Returns the position in `fields`, or -1 when no field contains the pixel.
inline int owning_field(std::span<const ReceptiveField> fields, double x, double y) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        if (!f.contains(x, y)) continue;
        const double dx = x - f.center.x;
        const double dy = y - f.center.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2 || (d2 == best_d2 && f.taxel_id < fields[static_cast<std::size_t>(best)].taxel_id)) {
            best = static_cast<int>(i);
            best_d2 = d2;
        }
    }
    return best;
}

namespace detail {

// Per-pixel membership mask for the current field layout.
inline std::vector<std::uint8_t> field_mask(std::span<const ReceptiveField> fields) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(kSensorWidth) * kSensorHeight, 0);
    for (const auto& f : fields) {
        const double r = f.diameter / 2.0;
        const int x0 = std::max(0, static_cast<int>(std::floor(f.center.x - r)));
        const int x1 = std::min(kSensorWidth - 1, static_cast<int>(std::ceil(f.center.x + r)));
        const int y0 = std::max(0, static_cast<int>(std::floor(f.center.y - r)));
        const int y1 = std::min(kSensorHeight - 1, static_cast<int>(std::ceil(f.center.y + r)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (f.contains(x, y)) mask[static_cast<std::size_t>(y) * kSensorWidth + x] = 1;
            }
        }
    }
    return mask;
}

}  // namespace detail

// Keeps events that lie inside some receptive field and have at least one
// other in-field event within `neighborhood_radius` pixels (Chebyshev) and
// `noise_window` microseconds. Order is preserved.
inline std::vector<PixelEvent> filter_noise(std::span<const PixelEvent> events,
                                            std::span<const ReceptiveField> fields,
                                            const TransducerConfig& config) {
    require_sorted(events);
    const auto mask = detail::field_mask(fields);
    const auto pixel = [](int x, int y) { return static_cast<std::size_t>(y) * kSensorWidth + x; };

    // Each pair is found when its later member is visited; both get marked.
    std::vector<std::uint8_t> keep(events.size(), 0);
    const int r = config.neighborhood_radius;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (!mask[pixel(e.x, e.y)]) continue;
        for (std::size_t j = i; j-- > 0;) {
            const auto& o = events[j];
            if (static_cast<TimeUs>(e.t) - static_cast<TimeUs>(o.t) > config.noise_window) break;
            if (std::abs(e.x - o.x) > r || std::abs(e.y - o.y) > r) continue;
            if (!mask[pixel(o.x, o.y)]) continue;
            keep[i] = 1;
            keep[j] = 1;
        }
    }

    std::vector<PixelEvent> out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (keep[i]) out.push_back(events[i]);
    }
    return out;
}

// Groups events by (pooling window, owning field). Windows tile the time axis
// from t = 0. Output is ordered by window, then by taxel id.
inline std::vector<TaxelEvent> pool_events(std::span<const PixelEvent> events,
                                           std::span<const ReceptiveField> fields,
                                           const TransducerConfig& config) {
    require_sorted(events);
    struct Acc {
        std::size_t count = 0;
        double sx = 0, sy = 0;
        long double st = 0;
    };
    std::vector<TaxelEvent> out;
    std::vector<Acc> acc(fields.size());
    std::vector<std::size_t> touched;

    auto flush = [&] {
        std::vector<std::pair<int, std::size_t>> order;
        order.reserve(touched.size());
        for (auto idx : touched) order.emplace_back(fields[idx].taxel_id, idx);
        std::sort(order.begin(), order.end());
        for (auto [id, idx] : order) {
            auto& a = acc[idx];
            const double n = static_cast<double>(a.count);
            out.push_back({id, a.count, {a.sx / n, a.sy / n},
                           static_cast<TimeUs>(std::llround(a.st / static_cast<long double>(a.count)))});
            a = Acc{};
        }
        touched.clear();
    };

    TimeUs window = -1;
    for (const auto& e : events) {
        const TimeUs w = static_cast<TimeUs>(e.t) / config.pooling_window;
        if (w != window) {
            flush();
            window = w;
        }
        const int idx = owning_field(fields, e.x, e.y);
        if (idx < 0) {
            throw InternalError("pixel (" + std::to_string(e.x) + ", " + std::to_string(e.y) +
                                ") lies in no receptive field; filter the stream first");
        }
        auto& a = acc[static_cast<std::size_t>(idx)];
        if (a.count == 0) touched.push_back(static_cast<std::size_t>(idx));
        ++a.count;
        a.sx += e.x;
        a.sy += e.y;
        a.st += e.t;
    }
    flush();
    return out;
}

// Moves each field with a taxel event toward that event's centroid.
inline std::vector<ReceptiveField> update_positions(std::span<const ReceptiveField> fields,
                                                    std::span<const TaxelEvent> taxel_events,
                                                    const TransducerConfig& config) {
    std::vector<ReceptiveField> out(fields.begin(), fields.end());
    for (const auto& te : taxel_events) {
        for (auto& f : out) {
            if (f.taxel_id != te.taxel_id) continue;
            f.center.x += config.rf_update_gain * (te.centroid.x - f.center.x);
            f.center.y += config.rf_update_gain * (te.centroid.y - f.center.y);
        }
    }
    return out;
}

// Full pipeline. Events at or after `duration` are ignored. Each window is
// filtered with the fields current at that window (neighbours may come from
// adjacent windows), pooled, and then used to update the fields.
inline Sample transduce(std::span<const PixelEvent> events, std::span<const ReceptiveField> initial_fields,
                        const TransducerConfig& config, TimeUs duration, std::string label = {}) {
    config.validate();
    require_sorted(events);
    if (initial_fields.size() != kTaxelCount) {
        throw ValidationError("transduce needs " + std::to_string(kTaxelCount) + " receptive fields");
    }
    for (const auto& f : initial_fields) {
        if (f.taxel_id < 0 || static_cast<std::size_t>(f.taxel_id) >= kTaxelCount) {
            throw ValidationError("receptive field has taxel id out of range");
        }
    }
    if (duration < 0) throw ParameterError("duration must be non-negative");

    Sample sample;
    sample.duration = duration;
    sample.label = std::move(label);

    std::vector<ReceptiveField> fields(initial_fields.begin(), initial_fields.end());
    const auto by_time = [](const PixelEvent& e, TimeUs t) { return static_cast<TimeUs>(e.t) < t; };

    for (TimeUs start = 0; start < duration; start += config.pooling_window) {
        const TimeUs end = std::min(start + config.pooling_window, duration);
        const auto first = std::lower_bound(events.begin(), events.end(), start, by_time);
        const auto last = std::lower_bound(first, events.end(), end, by_time);
        if (first == last) continue;

        // Context reaches one noise window beyond each side of the window.
        const auto ctx_first = std::lower_bound(events.begin(), first, start - config.noise_window, by_time);
        const auto ctx_last = std::lower_bound(last, events.end(), end + config.noise_window + 1, by_time);
        const std::span<const PixelEvent> context(ctx_first, ctx_last);
        auto filtered = filter_noise(context, fields, config);
        std::erase_if(filtered, [&](const PixelEvent& e) {
            return static_cast<TimeUs>(e.t) < start || static_cast<TimeUs>(e.t) >= end;
        });
        if (filtered.empty()) continue;

        const auto pooled = pool_events(filtered, fields, config);
        for (const auto& te : pooled) {
            auto& train = sample.trains[static_cast<std::size_t>(te.taxel_id)];
            TimeUs t = te.t;
            if (!train.empty() && t <= train.back()) t = train.back() + 1;
            if (t < duration) train.push_back(t);
        }
        fields = update_positions(fields, pooled, config);
    }
    return sample;
}

}  // namespace neurotac
