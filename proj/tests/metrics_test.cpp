#include "support.hpp"

#include <gtest/gtest.h>

using namespace neurotac;
using namespace neurotac::testing;

namespace {

std::vector<SpikeTrain> random_trains(Rng& rng, int max_spikes, TimeUs horizon) {
    std::vector<SpikeTrain> out(kTaxelCount);
    for (auto& tr : out) tr = random_train(rng, max_spikes, horizon);
    return out;
}

}  // namespace

TEST(Euclidean, BasicValues) {
    EXPECT_EQ(euclidean(IntensiveCode{3.0}, IntensiveCode{7.0}), 4.0);
    std::vector<double> a(49, 0.0), b(49, 0.0);
    a[0] = 1.0;
    b[1] = 1.0;
    EXPECT_DOUBLE_EQ(euclidean(SpatialCode{a}, SpatialCode{b}), std::sqrt(2.0));
    EXPECT_EQ(euclidean(SpatialCode{a}, SpatialCode{a}), 0.0);
    EXPECT_DOUBLE_EQ(euclidean(TemporalCode{{1, 2}, 5}, TemporalCode{{1, 2, 2}, 5}), 2.0);
}

TEST(Euclidean, MixedCodesAreAMismatch) {
    EXPECT_THROW(euclidean(IntensiveCode{1.0}, SpatialCode{}), MismatchError);
    EXPECT_THROW(euclidean(SpatiotemporalCode{}, SpatiotemporalCode{}), MismatchError);
}

TEST(VanRossum, ClosedFormExamples) {
    EXPECT_NEAR(van_rossum_single(SpikeTrain{0}, SpikeTrain{}, 0.01), std::sqrt(50.0), 1e-12);
    EXPECT_NEAR(van_rossum_single(SpikeTrain{0}, SpikeTrain{}, 0.01), 7.0711, 5e-5);
    const double want = std::sqrt((1.0 - std::exp(-1.0)) / 0.01);
    EXPECT_NEAR(van_rossum_single(SpikeTrain{0}, SpikeTrain{10000}, 0.01), want, 1e-12);
    EXPECT_NEAR(want, 7.9506, 5e-5);
}

TEST(VanRossum, ClosedFormsAgreeWithIntegration) {
    EXPECT_LE(rel_error(van_rossum_single(SpikeTrain{0}, SpikeTrain{}, 0.01), integrated_distance({0}, {}, 0.01)), 1e-6);
    EXPECT_LE(rel_error(van_rossum_single(SpikeTrain{0}, SpikeTrain{10000}, 0.01), integrated_distance({0}, {10000}, 0.01)),
              1e-6);
}

TEST(VanRossum, IdentityAndSymmetry) {
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto u = random_train(rng, 15, kMicrosPerSecond);
        const auto v = random_train(rng, 15, kMicrosPerSecond);
        EXPECT_NEAR(van_rossum_single(u, u, 0.02), 0.0, 1e-12);
        EXPECT_DOUBLE_EQ(van_rossum_single(u, v, 0.02), van_rossum_single(v, u, 0.02));
    }
}

TEST(VanRossum, SweepMatchesDoubleSum) {
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        auto u = random_train(rng, 30, 500 * kMicrosPerMilli);
        auto v = random_train(rng, 30, 500 * kMicrosPerMilli);
        if (i % 4 == 0 && !u.empty()) v.insert(std::upper_bound(v.begin(), v.end(), u[0]), u[0]);  // shared time
        const double tau = 0.001 * uniform_int(rng, 1, 100);
        EXPECT_LE(std::abs(kernel_inner_product(u, v, tau) - naive_inner_product(u, v, tau)),
                  1e-12 * std::max(1.0, naive_inner_product(u, v, tau)));
    }
}

TEST(VanRossum, RejectsNonPositiveTau) {
    EXPECT_THROW(van_rossum_single(SpikeTrain{0}, SpikeTrain{}, 0.0), ParameterError);
    EXPECT_THROW(kernel_inner_product(SpikeTrain{0}, SpikeTrain{}, -1.0), ParameterError);
}

TEST(MultiNeuron, LabelledLineExtreme) {
    Rng rng(10);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_trains(rng, 5, kMicrosPerSecond);
        const auto b = random_trains(rng, 5, kMicrosPerSecond);
        double sum = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) {
            const double d = van_rossum_single(a[n], b[n], 0.05);
            sum += d * d;
        }
        EXPECT_LE(rel_error(van_rossum_multi(a, b, 0.05, 0.0), std::sqrt(sum)), 1e-9);
    }
}

TEST(MultiNeuron, PopulationExtreme) {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_trains(rng, 5, kMicrosPerSecond);
        const auto b = random_trains(rng, 5, kMicrosPerSecond);
        SpikeTrain ma, mb;
        for (const auto& t : a) ma.insert(ma.end(), t.begin(), t.end());
        for (const auto& t : b) mb.insert(mb.end(), t.begin(), t.end());
        std::sort(ma.begin(), ma.end());
        std::sort(mb.begin(), mb.end());
        EXPECT_LE(rel_error(van_rossum_multi(a, b, 0.05, 1.0), van_rossum_single(ma, mb, 0.05)), 1e-9);
    }
}

TEST(MultiNeuron, IntermediateAnglesMatchTheBilinearForm) {
    Rng rng(12);
    for (int i = 0; i < 10; ++i) {
        const auto a = random_trains(rng, 3, 300 * kMicrosPerMilli);
        const auto b = random_trains(rng, 3, 300 * kMicrosPerMilli);
        for (double c : {0.0, 0.25, 0.4, 0.8, 1.0}) {
            EXPECT_LE(rel_error(van_rossum_multi(a, b, 0.076, c), bilinear_multi_distance(a, b, 0.076, c)), 1e-9)
                << "c = " << c;
        }
    }
}

TEST(MultiNeuron, IdentityAndErrors) {
    Rng rng(13);
    const auto a = random_trains(rng, 6, kMicrosPerSecond);
    for (double c : {0.0, 0.5, 1.0}) EXPECT_NEAR(van_rossum_multi(a, a, 0.02, c), 0.0, 1e-9);
    auto short_b = a;
    short_b.pop_back();
    EXPECT_THROW(van_rossum_multi(a, short_b, 0.02, 0.5), MismatchError);
    EXPECT_THROW(van_rossum_multi(a, a, 0.02, 1.5), ParameterError);
}

TEST(Dispatch, MetricMustFitTheCode) {
    const EncodedSample st = SpatiotemporalCode{std::vector<SpikeTrain>(49), 1000, 0.05};
    const EncodedSample sp = SpatialCode{std::vector<double>(49, 0.0)};
    EXPECT_THROW(distance(sp, sp, {MetricKind::van_rossum}), MismatchError);
    EXPECT_THROW(distance(st, st, {MetricKind::euclidean}), MismatchError);
    EXPECT_EQ(distance(st, st, {MetricKind::van_rossum, 0.05, 0.4}), 0.0);
    EXPECT_EQ(parse_metric_kind("van-rossum"), MetricKind::van_rossum);
    EXPECT_THROW(parse_metric_kind("cosine"), ParameterError);
}

TEST(Dispatch, PairwiseMatrixMatchesDirectCalls) {
    Rng rng(14);
    std::vector<EncodedSample> codes;
    for (int i = 0; i < 6; ++i) codes.push_back(encode_spatiotemporal(random_sample(rng, 4, kMicrosPerSecond), 0.03));
    const MetricSpec m{MetricKind::van_rossum, 0.03, 0.4};
    const auto d = pairwise_distances(codes, m);
    for (std::size_t i = 0; i < codes.size(); ++i) {
        EXPECT_EQ(d(i, i), 0.0);
        for (std::size_t j = 0; j < codes.size(); ++j) {
            EXPECT_NEAR(d(i, j), distance(codes[i], codes[j], m), 1e-9 * std::max(1.0, d(i, j)));
        }
    }
}
