#pragma once

// The four spike-train codes: intensive (mean spike count per taxel), spatial
// (spike count per taxel), temporal (rolling-window spikes per taxel at 1 ms
// steps) and spatiotemporal (spike trains tagged with an exponential kernel
// time constant, compared with Van Rossum distances).

#include "neurotac/error.hpp"
#include "neurotac/types.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace neurotac {

struct IntensiveCode {
    double value = 0.0;
    friend bool operator==(const IntensiveCode&, const IntensiveCode&) = default;
};

struct SpatialCode {
    std::vector<double> counts;
    friend bool operator==(const SpatialCode&, const SpatialCode&) = default;
};

struct TemporalCode {
    std::vector<double> series;  // one value per 1 ms step
    int delta_t_ms = 1;
    friend bool operator==(const TemporalCode&, const TemporalCode&) = default;
};

struct SpatiotemporalCode {
    std::vector<SpikeTrain> trains;
    TimeUs duration = 0;
    double tau_s = 0.0;
    friend bool operator==(const SpatiotemporalCode&, const SpatiotemporalCode&) = default;
};

using EncodedSample = std::variant<IntensiveCode, SpatialCode, TemporalCode, SpatiotemporalCode>;

enum class EncoderKind { intensive, spatial, temporal, spatiotemporal };

inline std::string_view to_string(EncoderKind k) {
    switch (k) {
        case EncoderKind::intensive: return "intensive";
        case EncoderKind::spatial: return "spatial";
        case EncoderKind::temporal: return "temporal";
        case EncoderKind::spatiotemporal: return "spatiotemporal";
    }
    return "?";
}

inline EncoderKind parse_encoder_kind(std::string_view s) {
    if (s == "intensive") return EncoderKind::intensive;
    if (s == "spatial") return EncoderKind::spatial;
    if (s == "temporal") return EncoderKind::temporal;
    if (s == "spatiotemporal") return EncoderKind::spatiotemporal;
    throw ParameterError("unknown encoder '" + std::string(s) + "'");
}

// Whole milliseconds needed to cover [0, duration).
inline int duration_ms(TimeUs duration) {
    return static_cast<int>((duration + kMicrosPerMilli - 1) / kMicrosPerMilli);
}

inline IntensiveCode encode_intensive(const Sample& sample) {
    return {static_cast<double>(sample.spike_count()) / static_cast<double>(sample.trains.size())};
}

inline SpatialCode encode_spatial(const Sample& sample) {
    SpatialCode code;
    code.counts.reserve(sample.trains.size());
    for (const auto& tr : sample.trains) code.counts.push_back(static_cast<double>(tr.size()));
    return code;
}

// series[k] = spikes in [k ms, k ms + delta_t) over all taxels, divided by N.
inline TemporalCode encode_temporal(const Sample& sample, int delta_t_ms) {
    const int total_ms = duration_ms(sample.duration);
    if (delta_t_ms < 1 || delta_t_ms > std::max(1, total_ms)) {
        throw ParameterError("delta_t of " + std::to_string(delta_t_ms) + " ms outside [1, " +
                             std::to_string(total_ms) + "] ms");
    }
    const auto bins = static_cast<std::size_t>(std::max(total_ms, delta_t_ms));
    std::vector<long> prefix(bins + 1, 0);
    for (const auto& tr : sample.trains) {
        for (TimeUs t : tr) {
            const auto b = static_cast<std::size_t>(t / kMicrosPerMilli);
            if (b < bins) ++prefix[b + 1];
        }
    }
    for (std::size_t i = 1; i < prefix.size(); ++i) prefix[i] += prefix[i - 1];

    TemporalCode code;
    code.delta_t_ms = delta_t_ms;
    const auto len = bins - static_cast<std::size_t>(delta_t_ms) + 1;
    const auto n = static_cast<double>(sample.trains.size());
    code.series.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
        code.series[k] = static_cast<double>(prefix[k + static_cast<std::size_t>(delta_t_ms)] - prefix[k]) / n;
    }
    return code;
}

inline SpatiotemporalCode encode_spatiotemporal(const Sample& sample, double tau_s) {
    if (!(tau_s > 0)) throw ParameterError("tau must be positive");
    return {sample.trains, sample.duration, tau_s};
}

// f(t) = sum_i h(t - t_i) with h(s) = exp(-s / tau) / tau for s >= 0, in 1/s.
inline double kernel_response(const SpikeTrain& train, double tau_s, TimeUs t) {
    if (!(tau_s > 0)) throw ParameterError("tau must be positive");
    double f = 0.0;
    for (TimeUs ti : train) {
        if (ti > t) break;
        f += std::exp(-to_seconds(t - ti) / tau_s) / tau_s;
    }
    return f;
}

struct EncoderSpec {
    EncoderKind kind = EncoderKind::intensive;
    int delta_t_ms = 159;
    double tau_s = 0.076;
};

inline EncodedSample encode(const Sample& sample, const EncoderSpec& spec) {
    switch (spec.kind) {
        case EncoderKind::intensive: return encode_intensive(sample);
        case EncoderKind::spatial: return encode_spatial(sample);
        case EncoderKind::temporal: return encode_temporal(sample, spec.delta_t_ms);
        case EncoderKind::spatiotemporal: return encode_spatiotemporal(sample, spec.tau_s);
    }
    throw ParameterError("unknown encoder");
}

// ---- structured-text cache format ------------------------------------------

inline nlohmann::json encoded_to_json(const EncodedSample& code) {
    return std::visit(
        [](const auto& c) -> nlohmann::json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, IntensiveCode>) {
                return {{"kind", "intensive"}, {"value", c.value}};
            } else if constexpr (std::is_same_v<T, SpatialCode>) {
                return {{"kind", "spatial"}, {"counts", c.counts}};
            } else if constexpr (std::is_same_v<T, TemporalCode>) {
                return {{"kind", "temporal"}, {"delta_t_ms", c.delta_t_ms}, {"series", c.series}};
            } else {
                return {{"kind", "spatiotemporal"}, {"tau_s", c.tau_s}, {"duration_us", c.duration},
                        {"trains", c.trains}};
            }
        },
        code);
}

inline EncodedSample encoded_from_json(const nlohmann::json& j) {
    try {
        switch (parse_encoder_kind(j.at("kind").get<std::string>())) {
            case EncoderKind::intensive: return IntensiveCode{j.at("value").get<double>()};
            case EncoderKind::spatial: return SpatialCode{j.at("counts").get<std::vector<double>>()};
            case EncoderKind::temporal:
                return TemporalCode{j.at("series").get<std::vector<double>>(), j.at("delta_t_ms").get<int>()};
            case EncoderKind::spatiotemporal:
                return SpatiotemporalCode{j.at("trains").get<std::vector<SpikeTrain>>(),
                                          j.at("duration_us").get<TimeUs>(), j.at("tau_s").get<double>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed encoded sample: ") + e.what());
    }
    throw FormatError("malformed encoded sample");
}

}  // namespace neurotac
