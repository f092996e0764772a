#pragma once

// Run configuration: one JSON file laid over built-in defaults. Command-line
// flags are applied on top by the caller.
//
//   {
//     "seed": 2019, "runs": 20, "k": 4, "split_ratio": 0.8, "out": "out",
//     "textures": [{"name": "grid_1.0mm", "kind": "grid", "pitch_mm": 1.0}, ...],
//     "kinematics": {"speed_mm_s": 15, "distance_mm": 60},
//     "sensor": {"taxel_spacing_px": 20, "noise_rate_hz": 100, ...},
//     "transducer": {"noise_window_ms": 5, "pooling_window_ms": 20, ...},
//     "encoder": {"kind": "temporal", "delta_t_ms": 159},
//     "metric": {"kind": "van-rossum", "tau_ms": 76, "cos_theta": 0.4}
//   }
//
// A missing "textures" list means the standard 0-5 mm grid set.

#include "neurotac/encoding.hpp"
#include "neurotac/error.hpp"
#include "neurotac/event_io.hpp"
#include "neurotac/metrics.hpp"
#include "neurotac/simulator.hpp"
#include "neurotac/transduction.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace neurotac {

struct RunConfig {
    std::vector<TextureSpec> textures = grid_texture_set();
    SlideKinematics kinematics;
    SensorModel sensor;
    double taxel_spacing_px = 20.0;
    TransducerConfig transducer;
    EncoderKind encoder = EncoderKind::intensive;
    std::optional<int> delta_t_ms;           // required by the temporal encoder
    std::optional<MetricKind> metric;        // defaults from the encoder
    double tau_ms = 76.0;
    double cos_theta = 0.4;
    int k = 4;
    double split_ratio = 0.8;
    std::uint64_t seed = 2019;
    int runs = 20;
    std::string out = "out";

    MetricKind resolved_metric() const {
        if (metric) return *metric;
        return encoder == EncoderKind::spatiotemporal ? MetricKind::van_rossum : MetricKind::euclidean;
    }

    EncoderSpec encoder_spec() const {
        if (encoder == EncoderKind::temporal && !delta_t_ms) {
            throw ParameterError("the temporal encoder needs --delta-t");
        }
        return {encoder, delta_t_ms.value_or(1), tau_ms / 1000.0};
    }

    MetricSpec metric_spec() const {
        MetricSpec m{resolved_metric(), tau_ms / 1000.0, cos_theta};
        m.validate();
        return m;
    }

    void validate() const {
        if (textures.empty()) throw ParameterError("texture list is empty");
        for (const auto& t : textures) t.validate();
        kinematics.validate();
        sensor.validate();
        transducer.validate();
        if (k < 1) throw ParameterError("k must be >= 1");
        if (runs < 1) throw ParameterError("runs must be >= 1");
        if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ParameterError("split_ratio must lie in (0, 1)");
        if (!(tau_ms > 0)) throw ParameterError("tau must be positive");
        if (!(cos_theta >= 0.0 && cos_theta <= 1.0)) throw ParameterError("cos_theta must lie in [0, 1]");
        if (delta_t_ms && *delta_t_ms < 1) throw ParameterError("delta_t must be >= 1 ms");
    }
};

namespace detail {

inline void only_keys(const nlohmann::json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw ValidationError(std::string(where) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto k : keys) known = known || key == k;
        if (!known) throw ValidationError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

inline TextureSpec texture_from_json(const nlohmann::json& j) {
    only_keys(j, "texture", {"name", "kind", "pitch_mm", "bump_height_mm", "roughness_amplitude_mm",
                             "roughness_correlation_mm"});
    TextureSpec t;
    t.name = j.at("name").get<std::string>();
    const auto kind = j.value("kind", std::string("grid"));
    if (kind == "grid") {
        t.kind = TextureKind::grid;
    } else if (kind == "stochastic") {
        t.kind = TextureKind::stochastic;
    } else {
        throw ValidationError("texture '" + t.name + "': unknown kind '" + kind + "'");
    }
    read_key(j, "pitch_mm", t.pitch_mm);
    read_key(j, "bump_height_mm", t.bump_height_mm);
    read_key(j, "roughness_amplitude_mm", t.roughness_amplitude_mm);
    read_key(j, "roughness_correlation_mm", t.roughness_correlation_mm);
    return t;
}

inline TimeUs millis_from(double ms) { return static_cast<TimeUs>(std::llround(ms * kMicrosPerMilli)); }

}  // namespace detail

// Overlays `j` on `cfg`. Unknown keys are rejected.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
    using detail::read_key;
    try {
        detail::only_keys(j, "config", {"seed", "runs", "k", "split_ratio", "out", "textures", "kinematics",
                                        "sensor", "transducer", "encoder", "metric"});
        read_key(j, "seed", cfg.seed);
        read_key(j, "runs", cfg.runs);
        read_key(j, "k", cfg.k);
        read_key(j, "split_ratio", cfg.split_ratio);
        read_key(j, "out", cfg.out);
        if (j.contains("textures")) {
            cfg.textures.clear();
            for (const auto& t : j.at("textures")) cfg.textures.push_back(detail::texture_from_json(t));
        }
        if (j.contains("kinematics")) {
            const auto& k = j.at("kinematics");
            detail::only_keys(k, "kinematics", {"speed_mm_s", "distance_mm"});
            read_key(k, "speed_mm_s", cfg.kinematics.speed_mm_s);
            read_key(k, "distance_mm", cfg.kinematics.distance_mm);
        }
        if (j.contains("sensor")) {
            const auto& s = j.at("sensor");
            detail::only_keys(s, "sensor",
                              {"taxel_spacing_px", "pixels_per_mm", "deflection_threshold_mm", "events_per_crossing",
                               "noise_rate_hz", "burst_radius_px", "membrane_span_mm", "pressure_variability",
                               "start_jitter_mm", "lateral_jitter_mm"});
            read_key(s, "taxel_spacing_px", cfg.taxel_spacing_px);
            read_key(s, "pixels_per_mm", cfg.sensor.pixels_per_mm);
            read_key(s, "deflection_threshold_mm", cfg.sensor.deflection_threshold_mm);
            read_key(s, "events_per_crossing", cfg.sensor.events_per_crossing);
            read_key(s, "noise_rate_hz", cfg.sensor.noise_rate_hz);
            read_key(s, "burst_radius_px", cfg.sensor.burst_radius_px);
            read_key(s, "membrane_span_mm", cfg.sensor.membrane_span_mm);
            read_key(s, "pressure_variability", cfg.sensor.pressure_variability);
            read_key(s, "start_jitter_mm", cfg.sensor.start_jitter_mm);
            read_key(s, "lateral_jitter_mm", cfg.sensor.lateral_jitter_mm);
            cfg.sensor.taxel_layout = layout_taxels(cfg.taxel_spacing_px);
        }
        if (j.contains("transducer")) {
            const auto& t = j.at("transducer");
            detail::only_keys(t, "transducer", {"noise_window_ms", "neighborhood_radius", "pooling_window_ms",
                                                "rf_diameter_px", "rf_update_gain"});
            if (t.contains("noise_window_ms")) cfg.transducer.noise_window = detail::millis_from(t.at("noise_window_ms").get<double>());
            if (t.contains("pooling_window_ms")) {
                cfg.transducer.pooling_window = detail::millis_from(t.at("pooling_window_ms").get<double>());
            }
            read_key(t, "neighborhood_radius", cfg.transducer.neighborhood_radius);
            read_key(t, "rf_diameter_px", cfg.transducer.rf_diameter);
            read_key(t, "rf_update_gain", cfg.transducer.rf_update_gain);
        }
        if (j.contains("encoder")) {
            const auto& e = j.at("encoder");
            detail::only_keys(e, "encoder", {"kind", "delta_t_ms"});
            if (e.contains("kind")) cfg.encoder = parse_encoder_kind(e.at("kind").get<std::string>());
            if (e.contains("delta_t_ms")) cfg.delta_t_ms = e.at("delta_t_ms").get<int>();
        }
        if (j.contains("metric")) {
            const auto& m = j.at("metric");
            detail::only_keys(m, "metric", {"kind", "tau_ms", "cos_theta"});
            if (m.contains("kind")) cfg.metric = parse_metric_kind(m.at("kind").get<std::string>());
            read_key(m, "tau_ms", cfg.tau_ms);
            read_key(m, "cos_theta", cfg.cos_theta);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

inline RunConfig load_config(const std::filesystem::path& path) {
    RunConfig cfg;
    apply_config_json(cfg, parse_json_file(path));
    return cfg;
}

inline nlohmann::json texture_to_json(const TextureSpec& t) {
    nlohmann::json j = {{"name", t.name}, {"kind", t.kind == TextureKind::grid ? "grid" : "stochastic"}};
    if (t.kind == TextureKind::grid) {
        j["pitch_mm"] = t.pitch_mm;
        j["bump_height_mm"] = t.bump_height_mm;
    } else {
        j["roughness_amplitude_mm"] = t.roughness_amplitude_mm;
        j["roughness_correlation_mm"] = t.roughness_correlation_mm;
    }
    return j;
}

}  // namespace neurotac
