#pragma once

// Distances between encoded samples.
//
// Euclidean distance serves the intensive, spatial and temporal codes. The
// spatiotemporal code uses the Van Rossum distance with the causal kernel
// h(t) = exp(-t / tau) / tau. For that kernel the L2 distance between filtered
// trains has a closed form built from the inner product
//
//     <u, v> = 1 / (2 tau) * sum_i sum_j exp(-|u_i - v_j| / tau)
//
// which the merge sweep below evaluates in O(|u| + |v|).
//
// The multi-neuron distance uses a uniform inter-neuron angle theta:
//
//     d^2 = sum_n g_nn + cos(theta) * sum_{n != m} g_nm
//
// with g_nm = <A_n - B_n, A_m - B_m>. cos(theta) = 0 sums independent
// per-taxel distances, cos(theta) = 1 superimposes all taxels first.

#include "neurotac/encoding.hpp"
#include "neurotac/error.hpp"
#include "neurotac/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace neurotac {

enum class MetricKind { euclidean, van_rossum };

inline MetricKind parse_metric_kind(std::string_view s) {
    if (s == "euclidean") return MetricKind::euclidean;
    if (s == "van-rossum" || s == "van_rossum") return MetricKind::van_rossum;
    throw ParameterError("unknown metric '" + std::string(s) + "'");
}

inline std::string_view to_string(MetricKind k) { return k == MetricKind::euclidean ? "euclidean" : "van-rossum"; }

struct MetricSpec {
    MetricKind kind = MetricKind::euclidean;
    double tau_s = 0.076;
    double cos_theta = 0.4;

    void validate() const {
        if (kind != MetricKind::van_rossum) return;
        if (!(tau_s > 0)) throw ParameterError("tau must be positive");
        if (!(cos_theta >= 0.0 && cos_theta <= 1.0)) throw ParameterError("cos_theta must lie in [0, 1]");
    }
};

// ---- Euclidean ---------------------------------------------------------------

namespace detail {

inline double l2_padded(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::max(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        s += (x - y) * (x - y);
    }
    return std::sqrt(s);
}

}  // namespace detail

inline double euclidean(const EncodedSample& a, const EncodedSample& b) {
    if (a.index() != b.index()) throw MismatchError("euclidean distance between different encodings");
    if (const auto* x = std::get_if<IntensiveCode>(&a)) {
        return std::abs(x->value - std::get<IntensiveCode>(b).value);
    }
    if (const auto* x = std::get_if<SpatialCode>(&a)) {
        const auto& y = std::get<SpatialCode>(b);
        if (x->counts.size() != y.counts.size()) throw MismatchError("spatial codes differ in taxel count");
        return detail::l2_padded(x->counts, y.counts);
    }
    if (const auto* x = std::get_if<TemporalCode>(&a)) {
        return detail::l2_padded(x->series, std::get<TemporalCode>(b).series);
    }
    throw MismatchError("euclidean distance is not defined for spatiotemporal codes");
}

// ---- Van Rossum ----------------------------------------------------------------

// <u, v> for the exponential kernel; spike times in microseconds, tau in
// seconds, result in 1/s. Inputs must be sorted (duplicates allowed).
inline double kernel_inner_product(std::span<const TimeUs> u, std::span<const TimeUs> v, double tau_s) {
    if (!(tau_s > 0)) throw ParameterError("tau must be positive");
    // Walk both trains in time order. At equal times v goes first, so every
    // pair is counted exactly once: (u_i, v_j) with v_j <= u_i through acc_v,
    // and with u_i < v_j through acc_u.
    double acc_u = 0.0, acc_v = 0.0, total = 0.0;
    std::size_t i = 0, j = 0;
    TimeUs now = 0;
    bool started = false;
    const auto advance = [&](TimeUs t) {
        if (started) {
            const double decay = std::exp(-to_seconds(t - now) / tau_s);
            acc_u *= decay;
            acc_v *= decay;
        }
        now = t;
        started = true;
    };
    while (i < u.size() || j < v.size()) {
        if (j < v.size() && (i == u.size() || v[j] <= u[i])) {
            advance(v[j]);
            total += acc_u;
            acc_v += 1.0;
            ++j;
        } else {
            advance(u[i]);
            total += acc_v;
            acc_u += 1.0;
            ++i;
        }
    }
    return total / (2.0 * tau_s);
}

inline double van_rossum_single(std::span<const TimeUs> u, std::span<const TimeUs> v, double tau_s) {
    const double d2 = kernel_inner_product(u, u, tau_s) + kernel_inner_product(v, v, tau_s) -
                      2.0 * kernel_inner_product(u, v, tau_s);
    return std::sqrt(std::max(0.0, d2));
}

// All taxels superimposed into one sorted train.
inline SpikeTrain merge_trains(std::span<const SpikeTrain> trains) {
    SpikeTrain merged;
    for (const auto& tr : trains) merged.insert(merged.end(), tr.begin(), tr.end());
    std::sort(merged.begin(), merged.end());
    return merged;
}

// Per-sample terms that do not depend on the other operand, so a pairwise
// distance needs only the cross products.
struct VanRossumTerms {
    std::vector<SpikeTrain> trains;
    SpikeTrain merged;
    std::vector<double> self;  // <A_n, A_n>
    double self_sum = 0.0;     // sum_n <A_n, A_n>
    double merged_self = 0.0;  // <sum_n A_n, sum_m A_m>
    double tau_s = 0.0;
};

inline VanRossumTerms prepare_van_rossum(std::span<const SpikeTrain> trains, double tau_s) {
    VanRossumTerms p;
    p.trains.assign(trains.begin(), trains.end());
    p.merged = merge_trains(trains);
    p.tau_s = tau_s;
    p.self.reserve(trains.size());
    for (const auto& tr : trains) {
        p.self.push_back(kernel_inner_product(tr, tr, tau_s));
        p.self_sum += p.self.back();
    }
    p.merged_self = kernel_inner_product(p.merged, p.merged, tau_s);
    return p;
}

inline double van_rossum_multi(const VanRossumTerms& a, const VanRossumTerms& b, double cos_theta) {
    if (a.trains.size() != b.trains.size()) throw MismatchError("samples differ in taxel count");
    if (a.tau_s != b.tau_s) throw MismatchError("prepared terms use different time constants");
    if (!(cos_theta >= 0.0 && cos_theta <= 1.0)) throw ParameterError("cos_theta must lie in [0, 1]");
    // sum_n g_nn (labelled line) and sum_{n,m} g_nm (population).
    double cross = 0.0;
    for (std::size_t n = 0; n < a.trains.size(); ++n) {
        cross += kernel_inner_product(a.trains[n], b.trains[n], a.tau_s);
    }
    const double diagonal = a.self_sum + b.self_sum - 2.0 * cross;
    double population = 0.0;
    if (cos_theta > 0.0) {
        population = a.merged_self + b.merged_self - 2.0 * kernel_inner_product(a.merged, b.merged, a.tau_s);
    }
    // sum_n g_nn + c * (sum_{n,m} g_nm - sum_n g_nn)
    const double d2 = (1.0 - cos_theta) * diagonal + cos_theta * population;
    return std::sqrt(std::max(0.0, d2));
}

inline double van_rossum_multi(std::span<const SpikeTrain> a, std::span<const SpikeTrain> b, double tau_s,
                               double cos_theta) {
    if (a.size() != b.size()) throw MismatchError("samples differ in taxel count");
    return van_rossum_multi(prepare_van_rossum(a, tau_s), prepare_van_rossum(b, tau_s), cos_theta);
}

inline double van_rossum_multi(const Sample& a, const Sample& b, double tau_s, double cos_theta) {
    return van_rossum_multi(std::span<const SpikeTrain>(a.trains), std::span<const SpikeTrain>(b.trains), tau_s,
                            cos_theta);
}

// ---- dispatch ----------------------------------------------------------------

inline void require_compatible(const EncodedSample& code, const MetricSpec& metric) {
    const bool spatiotemporal = std::holds_alternative<SpatiotemporalCode>(code);
    if (metric.kind == MetricKind::van_rossum && !spatiotemporal) {
        throw MismatchError("van-rossum metric needs the spatiotemporal encoding");
    }
    if (metric.kind == MetricKind::euclidean && spatiotemporal) {
        throw MismatchError("spatiotemporal encoding needs the van-rossum metric");
    }
}

inline double distance(const EncodedSample& a, const EncodedSample& b, const MetricSpec& metric) {
    metric.validate();
    require_compatible(a, metric);
    require_compatible(b, metric);
    if (metric.kind == MetricKind::euclidean) return euclidean(a, b);
    return van_rossum_multi(std::span<const SpikeTrain>(std::get<SpatiotemporalCode>(a).trains),
                            std::span<const SpikeTrain>(std::get<SpatiotemporalCode>(b).trains), metric.tau_s,
                            metric.cos_theta);
}

// Symmetric n x n matrix of pairwise distances, row-major.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

inline DistanceMatrix pairwise_distances(std::span<const EncodedSample> codes, const MetricSpec& metric) {
    metric.validate();
    for (const auto& c : codes) require_compatible(c, metric);
    DistanceMatrix m(codes.size());
    if (metric.kind == MetricKind::euclidean) {
        for (std::size_t i = 0; i < codes.size(); ++i) {
            for (std::size_t j = i + 1; j < codes.size(); ++j) m.set(i, j, euclidean(codes[i], codes[j]));
        }
        return m;
    }
    std::vector<VanRossumTerms> terms;
    terms.reserve(codes.size());
    for (const auto& c : codes) terms.push_back(prepare_van_rossum(std::get<SpatiotemporalCode>(c).trains, metric.tau_s));
    for (std::size_t i = 0; i < codes.size(); ++i) {
        for (std::size_t j = i + 1; j < codes.size(); ++j) {
            m.set(i, j, van_rossum_multi(terms[i], terms[j], metric.cos_theta));
        }
    }
    return m;
}

}  // namespace neurotac
