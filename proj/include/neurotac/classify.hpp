#pragma once

#include "neurotac/encoding.hpp"
#include "neurotac/error.hpp"
#include "neurotac/metrics.hpp"
#include "neurotac/seed.hpp"
#include "neurotac/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace neurotac {

// A training item as seen from one query.
struct Neighbor {
    double distance = 0.0;
    int label = 0;
};

struct KnnResult {
    int label = -1;
    std::size_t k_used = 0;
    bool k_clamped = false;  // k exceeded the training set
};

// Majority vote among the k nearest candidates. `candidates` must be in
// training-set order. Distance ties at the k-th place keep training order;
// vote ties go to the smallest summed distance, then to the label that comes
// first in training order.
inline KnnResult knn_vote(std::span<const Neighbor> candidates, std::size_t k) {
    if (k < 1) throw ParameterError("k must be >= 1");
    if (candidates.empty()) throw ParameterError("training set is empty");
    KnnResult result;
    result.k_clamped = k > candidates.size();
    result.k_used = std::min(k, candidates.size());

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return candidates[a].distance < candidates[b].distance; });

    struct Tally {
        std::size_t votes = 0;
        double sum = 0.0;
        std::size_t first = 0;  // earliest training position
    };
    std::map<int, Tally> tally;
    for (std::size_t r = 0; r < result.k_used; ++r) {
        const auto& c = candidates[order[r]];
        auto [it, inserted] = tally.try_emplace(c.label, Tally{0, 0.0, order[r]});
        it->second.votes += 1;
        it->second.sum += c.distance;
        it->second.first = std::min(it->second.first, order[r]);
    }
    const Tally* best = nullptr;
    for (const auto& [label, t] : tally) {
        const bool better = best == nullptr || t.votes > best->votes ||
                            (t.votes == best->votes && (t.sum < best->sum || (t.sum == best->sum && t.first < best->first)));
        if (better) {
            best = &t;
            result.label = label;
        }
    }
    return result;
}

// Generic KNN over any item type and distance callable.
template <typename Item, typename Distance>
KnnResult knn_classify(std::span<const Item> train, std::span<const int> labels, const Item& query, std::size_t k,
                       Distance&& dist) {
    if (train.size() != labels.size()) throw ParameterError("training items and labels differ in length");
    std::vector<Neighbor> candidates;
    candidates.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) candidates.push_back({dist(train[i], query), labels[i]});
    return knn_vote(candidates, k);
}

inline KnnResult knn_classify(std::span<const EncodedSample> train, std::span<const int> labels,
                              const EncodedSample& query, std::size_t k, const MetricSpec& metric) {
    return knn_classify(train, labels, query, k,
                        [&](const EncodedSample& a, const EncodedSample& b) { return distance(a, b, metric); });
}

// ---- reports -------------------------------------------------------------------

using ConfusionMatrix = std::vector<std::vector<long>>;

inline ConfusionMatrix confusion_matrix(std::span<const std::pair<std::string, std::string>> pairs,
                                        std::span<const std::string> classes) {
    const auto index = [&](const std::string& label) {
        auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end()) throw ValidationError("unknown label '" + label + "'");
        return static_cast<std::size_t>(it - classes.begin());
    };
    ConfusionMatrix m(classes.size(), std::vector<long>(classes.size(), 0));
    for (const auto& [truth, predicted] : pairs) ++m[index(truth)][index(predicted)];
    return m;
}

struct ClassificationReport {
    std::vector<std::string> classes;
    ConfusionMatrix confusion;  // rows: true class, columns: predicted
    double accuracy = 0.0;      // fraction
    std::vector<int> per_sample_correct;
    double dispersion = 0.0;  // population SD of the 0/100 per-sample scores
    bool k_clamped = false;

    double accuracy_percent() const { return 100.0 * accuracy; }
};

inline ClassificationReport make_report(std::span<const int> truth, std::span<const int> predicted,
                                        std::span<const std::string> classes) {
    if (truth.size() != predicted.size()) throw ParameterError("truth and predictions differ in length");
    ClassificationReport r;
    r.classes.assign(classes.begin(), classes.end());
    r.confusion.assign(classes.size(), std::vector<long>(classes.size(), 0));
    long correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto t = static_cast<std::size_t>(truth[i]);
        const auto p = static_cast<std::size_t>(predicted[i]);
        if (t >= classes.size() || p >= classes.size()) throw ValidationError("label index out of range");
        ++r.confusion[t][p];
        const int ok = truth[i] == predicted[i] ? 1 : 0;
        r.per_sample_correct.push_back(ok);
        correct += ok;
    }
    if (truth.empty()) return r;
    const auto n = static_cast<double>(truth.size());
    r.accuracy = static_cast<double>(correct) / n;
    double var = 0.0;
    for (int ok : r.per_sample_correct) {
        const double d = 100.0 * ok - 100.0 * r.accuracy;
        var += d * d;
    }
    r.dispersion = std::sqrt(var / n);
    return r;
}

// ---- protocols -----------------------------------------------------------------

inline std::vector<int> label_indices(const Dataset& d) {
    std::vector<int> labels;
    labels.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        const int c = d.class_index(s.label);
        if (c < 0) throw ValidationError("sample label '" + s.label + "' is not a declared class");
        labels.push_back(c);
    }
    return labels;
}

inline std::vector<EncodedSample> encode_all(const Dataset& d, const EncoderSpec& spec) {
    std::vector<EncodedSample> codes;
    codes.reserve(d.samples.size());
    for (const auto& s : d.samples) codes.push_back(encode(s, spec));
    return codes;
}

// Leave-one-out over a precomputed distance matrix.
inline ClassificationReport leave_one_out(const DistanceMatrix& distances, std::span<const int> labels,
                                          std::span<const std::string> classes, std::size_t k) {
    const std::size_t n = labels.size();
    if (n < 2) throw ValidationError("leave-one-out needs at least 2 samples");
    if (distances.size() != n) throw ParameterError("distance matrix does not match the label count");
    std::vector<int> predicted(n);
    bool clamped = false;
    std::vector<Neighbor> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        candidates.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) candidates.push_back({distances(i, j), labels[j]});
        }
        const auto r = knn_vote(candidates, k);
        predicted[i] = r.label;
        clamped = clamped || r.k_clamped;
    }
    auto report = make_report(labels, predicted, classes);
    report.k_clamped = clamped;
    return report;
}

inline ClassificationReport leave_one_out(const Dataset& dataset, const EncoderSpec& encoder,
                                          const MetricSpec& metric, std::size_t k) {
    const auto labels = label_indices(dataset);
    const auto codes = encode_all(dataset, encoder);
    return leave_one_out(pairwise_distances(codes, metric), labels, dataset.classes, k);
}

// Stratified split: each class is shuffled independently and the first
// round(ratio * n) samples (at least one, leaving at least one) go to train.
// Both halves keep the dataset's sample order.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& dataset, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("split ratio must lie in (0, 1)");
    std::vector<std::vector<std::size_t>> members(dataset.classes.size());
    const auto labels = label_indices(dataset);
    for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);

    std::vector<char> is_train(dataset.samples.size(), 0);
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto& idx = members[c];
        if (idx.size() < 2) {
            throw ValidationError("class '" + dataset.classes[c] + "' has fewer than 2 samples");
        }
        std::mt19937_64 rng(child_seed(seed, c, 0));
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        for (std::size_t r = 0; r < n_train; ++r) is_train[idx[r]] = 1;
    }
    Dataset train{{}, dataset.classes};
    Dataset test{{}, dataset.classes};
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        (is_train[i] ? train : test).samples.push_back(dataset.samples[i]);
    }
    return {std::move(train), std::move(test)};
}

// Classifies every test sample against the training set.
inline ClassificationReport evaluate_split(const Dataset& train, const Dataset& test, const EncoderSpec& encoder,
                                           const MetricSpec& metric, std::size_t k) {
    if (train.classes != test.classes) throw MismatchError("train and test declare different classes");
    const auto train_labels = label_indices(train);
    const auto test_labels = label_indices(test);
    const auto train_codes = encode_all(train, encoder);
    std::vector<int> predicted;
    bool clamped = false;
    for (const auto& s : test.samples) {
        const auto r = knn_classify(train_codes, train_labels, encode(s, encoder), k, metric);
        predicted.push_back(r.label);
        clamped = clamped || r.k_clamped;
    }
    auto report = make_report(test_labels, predicted, train.classes);
    report.k_clamped = clamped;
    return report;
}

}  // namespace neurotac
