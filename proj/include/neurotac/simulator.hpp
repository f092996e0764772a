#pragma once

// Deterministic stand-in for the robot + sensor rig: a tip with 49 pins slides
// over a textured surface and the camera reports pixel events whenever a pin
// moves.
//
// Pin model. Each pin rides on a compliant membrane. Over a grid texture the
// membrane sits on the bump tops and sags into the gaps between them; the sag
// depth grows with the square of the bump pitch relative to the membrane span
// and saturates at the bump height. The deflection a pin sees at a point of
// the texture is
//
//     height - sag(pitch) * (r / r_max)^2
//
// where r is the distance to the nearest bump rim and r_max the largest such
// distance in a grid cell. The camera side behaves like an event pixel: every
// time the pin's accumulated deflection change since its last burst reaches
// the threshold, one burst of pixel events is emitted around the pin.

#include "neurotac/error.hpp"
#include "neurotac/seed.hpp"
#include "neurotac/transduction.hpp"
#include "neurotac/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace neurotac {

enum class TextureKind { grid, stochastic };

struct TextureSpec {
    std::string name;
    TextureKind kind = TextureKind::grid;
    double pitch_mm = 0.0;        // bump diameter and gap; 0 is a smooth surface
    double bump_height_mm = 1.0;
    double roughness_amplitude_mm = 0.0;   // stochastic: RMS height
    double roughness_correlation_mm = 1.0; // stochastic: Gaussian correlation length

    void validate() const {
        if (!(pitch_mm >= 0)) throw ParameterError("texture '" + name + "': pitch must be >= 0");
        if (!(bump_height_mm >= 0)) throw ParameterError("texture '" + name + "': bump height must be >= 0");
        if (kind == TextureKind::stochastic) {
            if (!(roughness_amplitude_mm >= 0)) throw ParameterError("texture '" + name + "': amplitude must be >= 0");
            if (!(roughness_correlation_mm > 0)) {
                throw ParameterError("texture '" + name + "': correlation length must be positive");
            }
        }
    }
};

struct SlideKinematics {
    double speed_mm_s = 15.0;
    double distance_mm = 60.0;

    void validate() const {
        if (!(speed_mm_s > 0)) throw ParameterError("slide speed must be positive");
        if (!(distance_mm > 0)) throw ParameterError("slide distance must be positive");
    }

    TimeUs duration() const { return static_cast<TimeUs>(std::llround(distance_mm / speed_mm_s * 1e6)); }
};

// Hexagonal pin layout centred on the image: rings of 1, 6, 12 and 18 pins
// plus 12 of the 24 pins of the fourth ring (the two off-corner, off-midpoint
// pins of each edge), keeping the outline six-fold symmetric.
inline std::vector<Point2> layout_taxels(double spacing_px = 20.0) {
    constexpr int dirs[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
    const Point2 center{kSensorWidth / 2.0, kSensorHeight / 2.0};
    const auto to_image = [&](int q, int r) {
        return Point2{center.x + spacing_px * (q + r / 2.0), center.y + spacing_px * (r * std::numbers::sqrt3 / 2.0)};
    };

    std::vector<Point2> pins{center};
    for (int ring = 1; ring <= 4; ++ring) {
        // Walk the ring starting from the corner in direction 4.
        int q = ring * dirs[4][0];
        int r = ring * dirs[4][1];
        for (int side = 0; side < 6; ++side) {
            for (int step = 0; step < ring; ++step) {
                if (ring < 4 || step == 1 || step == 3) pins.push_back(to_image(q, r));
                q += dirs[side][0];
                r += dirs[side][1];
            }
        }
    }
    return pins;
}

struct SensorModel {
    std::vector<Point2> taxel_layout = layout_taxels();
    double pixels_per_mm = 10.0;
    double deflection_threshold_mm = 0.2;
    double events_per_crossing = 6.0;
    double noise_rate_hz = 100.0;
    int burst_radius_px = 2;

    // Membrane and per-run contact variability.
    double membrane_span_mm = 6.0;
    double pressure_variability = 0.06; // relative SD of the sag depth per run
    double start_jitter_mm = 0.1;       // slide start offset along the slide, U[0, j)
    double lateral_jitter_mm = 4.0;     // texture offset across the slide, U[-j, j)

    void validate() const {
        if (taxel_layout.size() != kTaxelCount) throw ValidationError("sensor model needs 49 pins");
        for (const auto& p : taxel_layout) {
            if (p.x < 6 || p.y < 6 || p.x > kSensorWidth - 6 || p.y > kSensorHeight - 6) {
                throw ValidationError("pin closer than 6 px to the image border");
            }
        }
        if (!(pixels_per_mm > 0)) throw ParameterError("pixels_per_mm must be positive");
        if (!(deflection_threshold_mm > 0)) throw ParameterError("deflection threshold must be positive");
        if (!(events_per_crossing >= 0)) throw ParameterError("events_per_crossing must be >= 0");
        if (!(noise_rate_hz >= 0)) throw ParameterError("noise rate must be >= 0");
        if (burst_radius_px < 0) throw ParameterError("burst radius must be >= 0");
        if (!(membrane_span_mm > 0)) throw ParameterError("membrane span must be positive");
        if (!(pressure_variability >= 0)) throw ParameterError("pressure variability must be >= 0");
        if (!(start_jitter_mm >= 0) || !(lateral_jitter_mm >= 0)) throw ParameterError("jitter must be >= 0");
    }
};

namespace detail {

// Height profile of a stochastic texture along the slide direction: white
// noise smoothed by a Gaussian of the correlation length, scaled to the
// requested RMS. Seeded by the texture name so every run meets the same
// surface.
class RoughProfile {
public:
    RoughProfile(const TextureSpec& tex, double x_min, double x_max) {
        const double sigma = tex.roughness_correlation_mm;
        const double margin = 4 * sigma;
        x0_ = x_min - margin;
        const auto n = static_cast<std::size_t>(std::ceil((x_max - x_min + 2 * margin) / kStep)) + 2;
        std::mt19937_64 rng(hash_name(tex.name));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> noise(n);
        for (auto& v : noise) v = normal(rng);

        const auto half = static_cast<std::ptrdiff_t>(std::ceil(3 * sigma / kStep));
        std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
        for (std::ptrdiff_t k = -half; k <= half; ++k) {
            const double u = k * kStep / sigma;
            kernel[static_cast<std::size_t>(k + half)] = std::exp(-0.5 * u * u);
        }
        values_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0;
            for (std::ptrdiff_t k = -half; k <= half; ++k) {
                const auto j = static_cast<std::ptrdiff_t>(i) + k;
                if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
                acc += kernel[static_cast<std::size_t>(k + half)] * noise[static_cast<std::size_t>(j)];
            }
            values_[i] = acc;
        }
        double mean = 0, sq = 0;
        for (double v : values_) mean += v;
        mean /= static_cast<double>(n);
        for (double v : values_) sq += (v - mean) * (v - mean);
        const double rms = std::sqrt(sq / static_cast<double>(n));
        for (auto& v : values_) v = rms > 0 ? (v - mean) / rms * tex.roughness_amplitude_mm : 0.0;
    }

    double operator()(double x) const {
        const double u = (x - x0_) / kStep;
        const auto i = static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(values_.size() - 2)));
        const double f = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
        return values_[i] * (1 - f) + values_[i + 1] * f;
    }

private:
    static constexpr double kStep = 0.01;  // mm
    double x0_ = 0.0;
    std::vector<double> values_;
};

inline double grid_deflection(double x, double y, double pitch, double height, double sag) {
    if (pitch <= 0) return 0.0;
    const double period = 2 * pitch;
    const double dx = std::fmod(std::fmod(x + pitch, period) + period, period) - pitch;
    const double dy = std::fmod(std::fmod(y + pitch, period) + period, period) - pitch;
    const double rim = std::max(0.0, std::hypot(dx, dy) - pitch / 2);
    const double rim_max = (std::numbers::sqrt2 - 0.5) * pitch;
    const double u = rim / rim_max;
    return height - sag * u * u;
}

}  // namespace detail

// Renders one slide into a sorted pixel-event stream with timestamps in
// [0, duration). Identical inputs give identical output.
inline std::vector<PixelEvent> simulate_slide(const TextureSpec& texture, const SlideKinematics& kinematics,
                                              const SensorModel& sensor, std::uint64_t seed) {
    texture.validate();
    kinematics.validate();
    sensor.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const TimeUs duration = kinematics.duration();
    const TimeUs step = kMicrosPerMilli;
    const auto steps = static_cast<std::size_t>((duration + step - 1) / step);

    // Per-run contact conditions.
    const double x_offset = unit(rng) * sensor.start_jitter_mm;
    const double y_offset = (2 * unit(rng) - 1) * sensor.lateral_jitter_mm;
    const double pressure = std::max(0.1, 1.0 + sensor.pressure_variability * normal(rng));

    const Point2 image_center{kSensorWidth / 2.0, kSensorHeight / 2.0};
    std::vector<Point2> pins_mm;
    pins_mm.reserve(sensor.taxel_layout.size());
    for (const auto& p : sensor.taxel_layout) {
        pins_mm.push_back({(p.x - image_center.x) / sensor.pixels_per_mm, (p.y - image_center.y) / sensor.pixels_per_mm});
    }

    const double travel_per_step = kinematics.speed_mm_s * to_seconds(step);
    const double pitch = texture.pitch_mm;
    const double sag = pressure * texture.bump_height_mm *
                       std::min(1.0, (pitch / sensor.membrane_span_mm) * (pitch / sensor.membrane_span_mm));

    std::unique_ptr<detail::RoughProfile> rough;
    if (texture.kind == TextureKind::stochastic) {
        double lo = 0, hi = 0;
        for (const auto& p : pins_mm) {
            lo = std::min(lo, p.x);
            hi = std::max(hi, p.x);
        }
        // Extent must not depend on the per-run offset, or each run would
        // meet a different surface.
        rough = std::make_unique<detail::RoughProfile>(
            texture, lo, hi + sensor.start_jitter_mm + travel_per_step * static_cast<double>(steps));
    }
    const auto deflection = [&](double x, double y) {
        if (rough) return pressure * (*rough)(x);
        return detail::grid_deflection(x, y, pitch, texture.bump_height_mm, sag);
    };

    std::poisson_distribution<int> burst_size(sensor.events_per_crossing);
    std::uniform_int_distribution<int> jitter(-sensor.burst_radius_px, sensor.burst_radius_px);
    std::uniform_int_distribution<TimeUs> in_step(0, step - 1);

    std::vector<PixelEvent> events;
    const auto emit_burst = [&](const Point2& pin_px, TimeUs step_start, Polarity pol) {
        const int n = burst_size(rng);
        for (int i = 0; i < n; ++i) {
            const long x = std::lround(pin_px.x) + jitter(rng);
            const long y = std::lround(pin_px.y) + jitter(rng);
            const TimeUs t = step_start + in_step(rng);
            if (x < 0 || y < 0 || x >= kSensorWidth || y >= kSensorHeight || t >= duration) continue;
            events.push_back({static_cast<std::uint32_t>(t), static_cast<std::uint16_t>(x),
                              static_cast<std::uint16_t>(y), pol});
        }
    };

    const double threshold = sensor.deflection_threshold_mm;
    for (std::size_t n = 0; n < pins_mm.size(); ++n) {
        const auto& pin = pins_mm[n];
        const double y = pin.y + y_offset;
        // Contact onset: every pin fires once as the tip lands.
        emit_burst(sensor.taxel_layout[n], 0, Polarity::on);
        double previous = deflection(pin.x + x_offset, y);
        double accumulated = 0.0;
        for (std::size_t k = 1; k < steps; ++k) {
            const double h = deflection(pin.x + x_offset + travel_per_step * static_cast<double>(k), y);
            const double change = h - previous;
            previous = h;
            const double before = std::floor(accumulated / threshold);
            accumulated += std::abs(change);
            const auto crossings = static_cast<int>(std::floor(accumulated / threshold) - before);
            for (int c = 0; c < crossings; ++c) {
                emit_burst(sensor.taxel_layout[n], static_cast<TimeUs>(k) * step,
                           change >= 0 ? Polarity::on : Polarity::off);
            }
        }
    }

    // Background activity, uniform over the image and the slide.
    std::poisson_distribution<long> noise_count(sensor.noise_rate_hz * to_seconds(duration));
    const long noise = sensor.noise_rate_hz > 0 ? noise_count(rng) : 0;
    std::uniform_int_distribution<int> nx(0, kSensorWidth - 1), ny(0, kSensorHeight - 1);
    std::uniform_int_distribution<TimeUs> nt(0, std::max<TimeUs>(0, duration - 1));
    for (long i = 0; i < noise && duration > 0; ++i) {
        const auto t = static_cast<std::uint32_t>(nt(rng));
        const auto x = static_cast<std::uint16_t>(nx(rng));
        const auto y = static_cast<std::uint16_t>(ny(rng));
        events.push_back({t, x, y, unit(rng) < 0.5 ? Polarity::off : Polarity::on});
    }

    std::stable_sort(events.begin(), events.end(),
                     [](const PixelEvent& a, const PixelEvent& b) { return a.t < b.t; });
    return events;
}

// Standard artificial texture set: grids from 0 (smooth) to 5 mm in 0.5 mm steps.
inline std::vector<TextureSpec> grid_texture_set() {
    std::vector<TextureSpec> set;
    for (int i = 0; i <= 10; ++i) {
        TextureSpec t;
        t.kind = TextureKind::grid;
        t.pitch_mm = 0.5 * i;
        char name[16];
        std::snprintf(name, sizeof name, "grid_%.1fmm", t.pitch_mm);
        t.name = name;
        set.push_back(t);
    }
    return set;
}

// Receptive fields initialised on the pin layout.
inline std::vector<ReceptiveField> initial_fields(const SensorModel& sensor, const TransducerConfig& config) {
    return make_fields(sensor.taxel_layout, config.rf_diameter);
}

inline Dataset generate_dataset(std::span<const TextureSpec> textures, int runs_per_texture,
                                const SlideKinematics& kinematics, const SensorModel& sensor,
                                const TransducerConfig& transducer, std::uint64_t master_seed) {
    if (textures.empty()) throw ParameterError("texture list is empty");
    if (runs_per_texture < 1) throw ParameterError("runs per texture must be >= 1");
    Dataset d;
    for (const auto& t : textures) {
        if (d.class_index(t.name) >= 0) throw ValidationError("duplicate texture name '" + t.name + "'");
        d.classes.push_back(t.name);
    }
    const auto fields = initial_fields(sensor, transducer);
    for (std::size_t ti = 0; ti < textures.size(); ++ti) {
        for (int run = 0; run < runs_per_texture; ++run) {
            const auto seed = child_seed(master_seed, ti, static_cast<std::uint64_t>(run));
            const auto events = simulate_slide(textures[ti], kinematics, sensor, seed);
            d.samples.push_back(transduce(events, fields, transducer, kinematics.duration(), textures[ti].name));
        }
    }
    return d;
}

}  // namespace neurotac
