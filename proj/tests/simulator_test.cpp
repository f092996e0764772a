#include "support.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <numbers>

using namespace neurotac;
using namespace neurotac::testing;

namespace {

TextureSpec grid(double pitch) {
    TextureSpec t;
    t.name = "g";
    t.pitch_mm = pitch;
    return t;
}

// Start times of bursts seen within 3 px of (cx, cy), onset excluded.
std::vector<TimeUs> bursts_near(const std::vector<PixelEvent>& events, int cx, int cy) {
    std::vector<TimeUs> out;
    for (const auto& e : events) {
        if (std::abs(e.x - cx) > 3 || std::abs(e.y - cy) > 3 || e.t < kMicrosPerMilli) continue;
        if (out.empty() || static_cast<TimeUs>(e.t) - out.back() > 1500) out.push_back(e.t);
    }
    return out;
}

double vector_strength(const std::vector<TimeUs>& times, double period_us) {
    std::complex<double> z;
    for (TimeUs t : times) z += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / period_us);
    return times.empty() ? 0.0 : std::abs(z) / static_cast<double>(times.size());
}

}  // namespace

TEST(Layout, FortyNinePinsCentredWithClearance) {
    const auto pins = layout_taxels();
    ASSERT_EQ(pins.size(), kTaxelCount);
    EXPECT_EQ(pins[0], (Point2{120, 90}));
    double mx = 0, my = 0, closest = 1e9;
    for (std::size_t i = 0; i < pins.size(); ++i) {
        mx += pins[i].x;
        my += pins[i].y;
        EXPECT_TRUE(inside_image(pins[i]));
        for (std::size_t j = i + 1; j < pins.size(); ++j) {
            closest = std::min(closest, std::hypot(pins[i].x - pins[j].x, pins[i].y - pins[j].y));
        }
    }
    EXPECT_NEAR(mx / 49.0, 120.0, 1e-9);
    EXPECT_NEAR(my / 49.0, 90.0, 1e-9);
    EXPECT_GE(closest, 12.0);
}

TEST(Simulate, SmoothSurfaceOnlyProducesTheOnsetBurst) {
    SensorModel s;
    s.noise_rate_hz = 0.0;
    const auto events = simulate_slide(grid(0.0), {}, s, 5);
    ASSERT_FALSE(events.empty());
    for (const auto& e : events) EXPECT_LT(e.t, 1000u);
}

TEST(Simulate, SameSeedSameBytes) {
    const auto a = encode_events(simulate_slide(grid(2.0), {}, {}, 99));
    const auto b = encode_events(simulate_slide(grid(2.0), {}, {}, 99));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, encode_events(simulate_slide(grid(2.0), {}, {}, 100)));
}

TEST(Simulate, OutputIsSortedAndInsideTheSlide) {
    const SlideKinematics kin;
    const auto events = simulate_slide(grid(3.0), kin, {}, 1);
    EXPECT_NO_THROW(require_sorted(events));
    for (const auto& e : events) {
        EXPECT_LT(static_cast<TimeUs>(e.t), kin.duration());
        EXPECT_TRUE(in_bounds(e));
    }
}

TEST(Simulate, CoarseGridLocksToItsSpatialPeriod) {
    // Bumps repeat every 2 * pitch along the slide.
    SensorModel s;
    s.noise_rate_hz = 0.0;
    const SlideKinematics kin;
    const double period_us = 2.0 * 5.0 / kin.speed_mm_s * 1e6;
    double locked = 0.0, off = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto b = bursts_near(simulate_slide(grid(5.0), kin, s, seed), 120, 90);
        locked += vector_strength(b, period_us);
        off += vector_strength(b, period_us / 10.0);
    }
    EXPECT_GT(locked / 5.0, 0.4);
    EXPECT_LT(off / 5.0, 0.4);
}

TEST(Simulate, CoarseAndFineGridsDiffer) {
    const auto coarse = simulate_slide(grid(5.0), {}, {}, 8);
    const auto fine = simulate_slide(grid(0.5), {}, {}, 8);
    EXPECT_NE(coarse, fine);
    EXPECT_GT(coarse.size(), fine.size());
}

TEST(Simulate, CoarseGridYieldsMoreSpikesThanSmooth) {
    const SensorModel sensor;
    const TransducerConfig cfg;
    const auto fields = initial_fields(sensor, cfg);
    const SlideKinematics kin;
    const auto coarse = transduce(simulate_slide(grid(5.0), kin, sensor, 4), fields, cfg, kin.duration());
    const auto smooth = transduce(simulate_slide(grid(0.0), kin, sensor, 4), fields, cfg, kin.duration());
    EXPECT_GT(coarse.spike_count(), smooth.spike_count());
}

TEST(Simulate, StochasticTextureIsReproducibleAndNameSeeded) {
    TextureSpec a;
    a.name = "bark";
    a.kind = TextureKind::stochastic;
    a.roughness_amplitude_mm = 0.8;
    TextureSpec b = a;
    b.name = "cork";
    const auto ea = simulate_slide(a, {}, {}, 3);
    EXPECT_EQ(ea, simulate_slide(a, {}, {}, 3));
    EXPECT_NE(ea, simulate_slide(b, {}, {}, 3));
}

TEST(Simulate, RejectsBadParameters) {
    SlideKinematics kin;
    kin.speed_mm_s = 0;
    EXPECT_THROW(simulate_slide(grid(1.0), kin, {}, 1), ParameterError);
    EXPECT_THROW(simulate_slide(grid(-1.0), {}, {}, 1), ParameterError);
    SensorModel s;
    s.taxel_layout.pop_back();
    EXPECT_THROW(simulate_slide(grid(1.0), {}, s, 1), ValidationError);
}

TEST(Dataset, CardinalityLabelsAndDeterminism) {
    SlideKinematics kin;
    kin.distance_mm = 15.0;
    std::vector<TextureSpec> textures = {grid(1.0), grid(4.0)};
    textures[0].name = "fine";
    textures[1].name = "coarse";
    const auto d = generate_dataset(textures, 3, kin, {}, {}, 42);
    ASSERT_EQ(d.samples.size(), 6u);
    EXPECT_EQ(d.classes, (std::vector<std::string>{"fine", "coarse"}));
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(d.samples[i].label, i < 3 ? "fine" : "coarse");
    EXPECT_NO_THROW(validate(d));
    EXPECT_EQ(d, generate_dataset(textures, 3, kin, {}, {}, 42));
    EXPECT_NE(d, generate_dataset(textures, 3, kin, {}, {}, 43));
}

TEST(Dataset, GridSetNames) {
    const auto set = grid_texture_set();
    ASSERT_EQ(set.size(), 11u);
    EXPECT_EQ(set.front().name, "grid_0.0mm");
    EXPECT_EQ(set.back().name, "grid_5.0mm");
    EXPECT_DOUBLE_EQ(set[3].pitch_mm, 1.5);
}

TEST(Seeds, ChildSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a) {
        for (std::uint64_t b = 0; b < 50; ++b) seen.insert(child_seed(7, a, b));
    }
    EXPECT_EQ(seen.size(), 1000u);
}
