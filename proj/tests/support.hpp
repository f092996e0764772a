#pragma once

// Seeded generators and brute-force reference computations shared by the
// unit tests and the acceptance binary. Nothing here calls the library's
// distance code.

#include "neurotac/neurotac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace neurotac::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Sorted, distinct spike times in [0, horizon).
inline SpikeTrain random_train(Rng& rng, int max_spikes, TimeUs horizon, int min_spikes = 0) {
    const int n = uniform_int(rng, min_spikes, max_spikes);
    std::set<TimeUs> times;
    std::uniform_int_distribution<TimeUs> t(0, horizon - 1);
    while (static_cast<int>(times.size()) < n) times.insert(t(rng));
    return {times.begin(), times.end()};
}

inline Sample random_sample(Rng& rng, int max_spikes_per_taxel, TimeUs duration, const std::string& label = "x") {
    Sample s;
    s.duration = duration;
    s.label = label;
    for (auto& tr : s.trains) tr = random_train(rng, max_spikes_per_taxel, duration);
    return s;
}

// Sorted pixel events: bursts around random pins plus uniform background.
inline std::vector<PixelEvent> random_stream(Rng& rng, std::span<const Point2> pins, TimeUs span, int bursts,
                                             int background) {
    std::vector<PixelEvent> events;
    std::uniform_int_distribution<TimeUs> t(0, span - 1);
    for (int b = 0; b < bursts; ++b) {
        const auto& p = pins[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pins.size()) - 1))];
        const TimeUs t0 = t(rng);
        const int n = uniform_int(rng, 1, 8);
        for (int i = 0; i < n; ++i) {
            const int x = std::clamp(static_cast<int>(std::lround(p.x)) + uniform_int(rng, -3, 3), 0, kSensorWidth - 1);
            const int y = std::clamp(static_cast<int>(std::lround(p.y)) + uniform_int(rng, -3, 3), 0, kSensorHeight - 1);
            const TimeUs ti = std::min<TimeUs>(span - 1, t0 + uniform_int(rng, 0, 3000));
            events.push_back({static_cast<std::uint32_t>(ti), static_cast<std::uint16_t>(x),
                              static_cast<std::uint16_t>(y), uniform_int(rng, 0, 1) ? Polarity::on : Polarity::off});
        }
    }
    for (int i = 0; i < background; ++i) {
        events.push_back({static_cast<std::uint32_t>(t(rng)), static_cast<std::uint16_t>(uniform_int(rng, 0, kSensorWidth - 1)),
                          static_cast<std::uint16_t>(uniform_int(rng, 0, kSensorHeight - 1)), Polarity::on});
    }
    std::stable_sort(events.begin(), events.end(), [](const PixelEvent& a, const PixelEvent& b) { return a.t < b.t; });
    return events;
}

// ---- reference computations --------------------------------------------------

// (1 / 2 tau) * sum_i sum_j exp(-|u_i - v_j| / tau) by the double loop.
inline double naive_inner_product(const SpikeTrain& u, const SpikeTrain& v, double tau_s) {
    double s = 0.0;
    for (TimeUs a : u) {
        for (TimeUs b : v) s += std::exp(-std::abs(static_cast<double>(a - b)) * 1e-6 / tau_s);
    }
    return s / (2.0 * tau_s);
}

// sqrt of the integral of (f_u - f_v)^2 over a 1 us grid, trapezoid rule on
// each step with one-sided limits at the spikes. The filtered difference is
// carried forward by its exact per-step decay. The integral runs until the
// signal has decayed by exp(-40).
inline double integrated_distance(const SpikeTrain& u, const SpikeTrain& v, double tau_s) {
    if (u.empty() && v.empty()) return 0.0;
    TimeUs first = std::numeric_limits<TimeUs>::max(), last = 0;
    for (const auto* tr : {&u, &v}) {
        if (tr->empty()) continue;
        first = std::min(first, tr->front());
        last = std::max(last, tr->back());
    }
    const double h = 1e-6;
    const double decay = std::exp(-h / tau_s);
    const auto end = last + static_cast<TimeUs>(std::ceil(40.0 * tau_s * 1e6));
    std::size_t iu = 0, iv = 0;
    double g = 0.0;  // f_u - f_v just after the current grid point
    long double integral = 0.0;
    for (TimeUs t = first; t < end; ++t) {
        while (iu < u.size() && u[iu] == t) {
            g += 1.0 / tau_s;
            ++iu;
        }
        while (iv < v.size() && v[iv] == t) {
            g -= 1.0 / tau_s;
            ++iv;
        }
        const double next = g * decay;  // left limit at t + 1
        integral += 0.5 * h * (g * g + next * next);
        g = next;
    }
    return std::sqrt(static_cast<double>(integral));
}

// Multi-neuron distance from the full bilinear form
//   d^2 = sum_n sum_m w_nm <A_n - B_n, A_m - B_m>,  w_nn = 1, w_nm = c,
// every inner product by the double loop.
inline double bilinear_multi_distance(const std::vector<SpikeTrain>& a, const std::vector<SpikeTrain>& b, double tau_s,
                                      double cos_theta) {
    const std::size_t n = a.size();
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double g = naive_inner_product(a[i], a[j], tau_s) - naive_inner_product(a[i], b[j], tau_s) -
                             naive_inner_product(b[i], a[j], tau_s) + naive_inner_product(b[i], b[j], tau_s);
            d2 += (i == j ? 1.0 : cos_theta) * g;
        }
    }
    return std::sqrt(std::max(0.0, d2));
}

inline double rel_error(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

// Average ranks (ties share the mean rank), then Pearson on the ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double planted_objective(double c, double tau_ms) {
    return std::exp(-20.0 * (c - 0.4) * (c - 0.4) - 0.002 * (tau_ms - 76.0) * (tau_ms - 76.0));
}

}  // namespace neurotac::testing
