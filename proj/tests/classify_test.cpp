#include "support.hpp"

#include <gtest/gtest.h>

using namespace neurotac;
using namespace neurotac::testing;

namespace {

Dataset labelled(int per_class, const std::vector<std::string>& classes, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d{{}, classes};
    for (const auto& c : classes) {
        for (int i = 0; i < per_class; ++i) d.samples.push_back(random_sample(rng, 2, 100 * kMicrosPerMilli, c));
    }
    return d;
}

}  // namespace

TEST(Knn, ExactMatchWithOneNeighbour) {
    const std::vector<EncodedSample> train = {IntensiveCode{1.0}, IntensiveCode{5.0}, IntensiveCode{9.0}};
    const std::vector<int> labels = {0, 1, 2};
    EXPECT_EQ(knn_classify(train, labels, IntensiveCode{5.0}, 1, MetricSpec{}).label, 1);
}

TEST(Knn, VoteTieGoesToSmallerSummedDistance) {
    const std::vector<Neighbor> n = {{0.4, 0}, {0.6, 0}, {0.9, 1}, {1.1, 1}, {5.0, 2}};
    const auto r = knn_vote(n, 4);
    EXPECT_EQ(r.label, 0);
    EXPECT_EQ(r.k_used, 4u);
    EXPECT_FALSE(r.k_clamped);
}

TEST(Knn, FullTieGoesToEarliestTrainingItem) {
    const std::vector<Neighbor> n = {{1.0, 1}, {1.0, 0}};
    EXPECT_EQ(knn_vote(n, 2).label, 1);
}

TEST(Knn, DistanceTieAtTheCutKeepsTrainingOrder) {
    const std::vector<Neighbor> n = {{0.5, 0}, {1.0, 2}, {1.0, 1}};
    EXPECT_EQ(knn_vote(n, 2).label, 0);  // {0, 2} enter, 0 wins on summed distance
    const std::vector<Neighbor> m = {{1.0, 2}, {0.5, 1}, {1.0, 0}};
    EXPECT_EQ(knn_vote(m, 2).label, 1);
}

TEST(Knn, KIsClampedToTheTrainingSet) {
    const std::vector<Neighbor> n = {{1.0, 0}, {2.0, 1}, {3.0, 1}};
    const auto r = knn_vote(n, 4);
    EXPECT_TRUE(r.k_clamped);
    EXPECT_EQ(r.k_used, 3u);
    EXPECT_EQ(r.label, 1);
    EXPECT_THROW(knn_vote(n, 0), ParameterError);
    EXPECT_THROW(knn_vote({}, 1), ParameterError);
}

TEST(Knn, IncompatibleMetricIsAMismatch) {
    const std::vector<EncodedSample> train = {IntensiveCode{1.0}};
    const std::vector<int> labels = {0};
    EXPECT_THROW(knn_classify(train, labels, IntensiveCode{1.0}, 1, MetricSpec{MetricKind::van_rossum}), MismatchError);
}

TEST(Confusion, DiagonalSinglePairAndUnknownLabel) {
    const std::vector<std::string> classes = {"A", "B"};
    const std::vector<std::pair<std::string, std::string>> right = {{"A", "A"}, {"B", "B"}, {"B", "B"}};
    EXPECT_EQ(confusion_matrix(right, classes), (ConfusionMatrix{{1, 0}, {0, 2}}));
    const std::vector<std::pair<std::string, std::string>> one = {{"A", "B"}};
    EXPECT_EQ(confusion_matrix(one, classes), (ConfusionMatrix{{0, 1}, {0, 0}}));
    const std::vector<std::pair<std::string, std::string>> bad = {{"A", "C"}};
    EXPECT_THROW(confusion_matrix(bad, classes), ValidationError);
}

TEST(Confusion, RowSumsAreClassCounts) {
    Rng rng(30);
    const std::vector<std::string> classes = {"a", "b", "c", "d"};
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<long> expected(4, 0);
    for (int i = 0; i < 500; ++i) {
        const int t = uniform_int(rng, 0, 3);
        ++expected[static_cast<std::size_t>(t)];
        pairs.emplace_back(classes[static_cast<std::size_t>(t)], classes[static_cast<std::size_t>(uniform_int(rng, 0, 3))]);
    }
    const auto m = confusion_matrix(pairs, classes);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(std::accumulate(m[i].begin(), m[i].end(), 0L), expected[i]);
}

TEST(Report, DispersionIsPopulationSd) {
    const std::vector<std::string> classes = {"a", "b"};
    const std::vector<int> truth = {0, 0, 1, 1};
    const std::vector<int> pred = {0, 1, 1, 1};
    const auto r = make_report(truth, pred, classes);
    EXPECT_DOUBLE_EQ(r.accuracy_percent(), 75.0);
    EXPECT_NEAR(r.dispersion, std::sqrt(0.75 * 0.25) * 100.0, 1e-12);
}

TEST(Split, EightTwoPerClass) {
    const auto d = labelled(10, {"a", "b", "c"}, 1);
    const auto [train, test] = train_test_split(d, 0.8, 7);
    EXPECT_EQ(train.samples.size(), 24u);
    EXPECT_EQ(test.samples.size(), 6u);
    for (const auto& c : d.classes) {
        EXPECT_EQ(std::count_if(train.samples.begin(), train.samples.end(), [&](const Sample& s) { return s.label == c; }), 8);
    }
    const auto [train2, test2] = train_test_split(d, 0.8, 7);
    EXPECT_EQ(train, train2);
    EXPECT_EQ(test, test2);
    const auto [train3, test3] = train_test_split(d, 0.8, 8);
    EXPECT_NE(train, train3);
}

TEST(Split, ElevenClassesOfOneHundred) {
    std::vector<std::string> classes;
    for (int i = 0; i < 11; ++i) classes.push_back("c" + std::to_string(i));
    Dataset d{{}, classes};
    for (const auto& c : classes) {
        for (int i = 0; i < 100; ++i) {
            Sample s;
            s.duration = 1000;
            s.label = c;
            d.samples.push_back(s);
        }
    }
    const auto [train, test] = train_test_split(d, 0.8, 1);
    EXPECT_EQ(train.samples.size(), 880u);
    EXPECT_EQ(test.samples.size(), 220u);
}

TEST(Split, NeedsTwoSamplesPerClass) {
    const auto d = labelled(1, {"a", "b"}, 2);
    EXPECT_THROW(train_test_split(d, 0.8, 1), ValidationError);
    EXPECT_THROW(train_test_split(labelled(3, {"a"}, 2), 1.0, 1), ParameterError);
}

TEST(LeaveOneOut, DuplicatesAreAlwaysRight) {
    Rng rng(40);
    Dataset d{{}, {"a", "b", "c"}};
    for (const auto& c : d.classes) {
        const auto s = random_sample(rng, 6, 200 * kMicrosPerMilli, c);
        d.samples.push_back(s);
        d.samples.push_back(s);
    }
    for (auto kind : {EncoderKind::spatial, EncoderKind::spatiotemporal}) {
        const MetricSpec m{kind == EncoderKind::spatiotemporal ? MetricKind::van_rossum : MetricKind::euclidean, 0.02, 0.4};
        const auto r = leave_one_out(d, {kind, 1, 0.02}, m, 1);
        EXPECT_EQ(r.accuracy, 1.0);
        EXPECT_EQ(r.dispersion, 0.0);
    }
}

TEST(LeaveOneOut, MatchesAHandRolledLoop) {
    const auto d = labelled(6, {"a", "b", "c"}, 3);
    const EncoderSpec enc{EncoderKind::temporal, 20, 0.0};
    const auto r = leave_one_out(d, enc, {}, 3);
    const auto labels = label_indices(d);
    long correct = 0;
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        std::vector<EncodedSample> train;
        std::vector<int> train_labels;
        for (std::size_t j = 0; j < d.samples.size(); ++j) {
            if (j == i) continue;
            train.push_back(encode(d.samples[j], enc));
            train_labels.push_back(labels[j]);
        }
        correct += knn_classify(train, train_labels, encode(d.samples[i], enc), 3, MetricSpec{}).label == labels[i];
    }
    EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(correct) / static_cast<double>(d.samples.size()));
}

TEST(EvaluateSplit, ReportsTestSetOnly) {
    const auto d = labelled(5, {"a", "b"}, 4);
    const auto [train, test] = train_test_split(d, 0.6, 3);
    const auto r = evaluate_split(train, test, {EncoderKind::spatial}, {}, 1);
    long total = 0;
    for (const auto& row : r.confusion) total += std::accumulate(row.begin(), row.end(), 0L);
    EXPECT_EQ(total, static_cast<long>(test.samples.size()));
}
