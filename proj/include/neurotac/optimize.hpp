#pragma once

// Parameter selection. The temporal window is swept exhaustively; the
// spatiotemporal pair (cos_theta, tau) goes through a small Gaussian-process
// loop with expected improvement scanned over a fixed 64 x 64 grid.

#include "neurotac/classify.hpp"
#include "neurotac/encoding.hpp"
#include "neurotac/error.hpp"
#include "neurotac/metrics.hpp"
#include "neurotac/seed.hpp"
#include "neurotac/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace neurotac {

// ---- exhaustive sweep ------------------------------------------------------

struct SweepPoint {
    int value = 0;
    double accuracy = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> evaluated;
    SweepPoint best;
};

// Evaluates `objective` at lo, lo + stride, ... <= hi. Ties keep the smallest value.
inline SweepResult sweep(int lo, int hi, int stride, const std::function<double(int)>& objective) {
    if (stride < 1) throw ParameterError("stride must be >= 1");
    if (lo > hi) throw ParameterError("sweep range is empty");
    SweepResult r;
    for (int v = lo; v <= hi; v += stride) {
        r.evaluated.push_back({v, objective(v)});
        if (r.evaluated.size() == 1 || r.evaluated.back().accuracy > r.best.accuracy) r.best = r.evaluated.back();
        if (hi - v < stride) break;
    }
    return r;
}

// At most `per_class` samples of each class, chosen per class by a seeded
// shuffle; 0 keeps everything. Sample order is preserved.
inline Dataset subsample(const Dataset& dataset, std::size_t per_class, std::uint64_t seed) {
    if (per_class == 0) return dataset;
    const auto labels = label_indices(dataset);
    std::vector<std::vector<std::size_t>> members(dataset.classes.size());
    for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
    std::vector<char> keep(dataset.samples.size(), 0);
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto& idx = members[c];
        std::mt19937_64 rng(child_seed(seed, c, 1));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t r = 0; r < std::min(per_class, idx.size()); ++r) keep[idx[r]] = 1;
    }
    Dataset out{{}, dataset.classes};
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        if (keep[i]) out.samples.push_back(dataset.samples[i]);
    }
    return out;
}

// Leave-one-out accuracy of the temporal code at each delta_t in [lo, hi] ms.
inline SweepResult sweep_delta_t(const Dataset& dataset, int lo_ms, int hi_ms, int stride_ms, std::size_t k) {
    if (dataset.samples.empty()) throw ValidationError("dataset is empty");
    if (stride_ms < 1) throw ParameterError("stride must be >= 1 ms");
    if (lo_ms > hi_ms) throw ParameterError("delta_t range is empty");
    int shortest = duration_ms(dataset.samples.front().duration);
    for (const auto& s : dataset.samples) shortest = std::min(shortest, duration_ms(s.duration));
    if (lo_ms < 1 || hi_ms > shortest) {
        throw ParameterError("delta_t range must lie within [1, " + std::to_string(shortest) + "] ms");
    }
    const auto labels = label_indices(dataset);
    return sweep(lo_ms, hi_ms, stride_ms, [&](int dt) {
        const auto codes = encode_all(dataset, {EncoderKind::temporal, dt, 0.0});
        return leave_one_out(pairwise_distances(codes, {}), labels, dataset.classes, k).accuracy;
    });
}

// ---- surrogate optimisation ------------------------------------------------

struct SurrogateBounds {
    double cos_lo = 0.0, cos_hi = 1.0;
    double tau_lo_ms = 10.0, tau_hi_ms = 100.0;

    void validate() const {
        if (!(cos_lo >= 0.0 && cos_hi <= 1.0 && cos_lo < cos_hi)) {
            throw ParameterError("cos_theta bounds must satisfy 0 <= lo < hi <= 1");
        }
        if (!(tau_lo_ms > 0.0 && tau_lo_ms < tau_hi_ms && std::isfinite(tau_hi_ms))) {
            throw ParameterError("tau bounds must satisfy 0 < lo < hi");
        }
    }
};

struct Trial {
    double cos_theta = 0.0;
    double tau_ms = 0.0;
    double accuracy = 0.0;
};

struct SurrogateResult {
    std::vector<Trial> trials;
    Trial best;
    int epochs = 0;
};

// Objective over (cos_theta, tau in ms).
using SurrogateObjective = std::function<double(double, double)>;

namespace detail {

inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// GP over the unit square with a squared-exponential kernel. The Cholesky
// factor grows one row per observation and every scan point keeps its
// L^-1 k(X, x*) column up to date, so an epoch costs O(grid * n).
class GridGp {
public:
    static constexpr int kSide = 64;
    static constexpr double kLength = 0.2;
    static constexpr double kNoise = 1e-3;

    GridGp() : v_(static_cast<std::size_t>(kSide * kSide)), vv_(static_cast<std::size_t>(kSide * kSide), 0.0) {}

    static double grid_coord(int i) { return static_cast<double>(i) / (kSide - 1); }

    static double kernel(double ax, double ay, double bx, double by) {
        const double dx = ax - bx, dy = ay - by;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * kLength * kLength));
    }

    void add(double x, double y) {
        const std::size_t n = xs_.size();
        std::vector<double> row(n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            double s = kernel(xs_[i], ys_[i], x, y);
            for (std::size_t j = 0; j < i; ++j) s -= L_[i][j] * row[j];
            row[i] = s / L_[i][i];
        }
        double diag = 1.0 + kNoise;
        for (std::size_t j = 0; j < n; ++j) diag -= row[j] * row[j];
        row[n] = std::sqrt(std::max(diag, 1e-12));
        L_.push_back(std::move(row));
        xs_.push_back(x);
        ys_.push_back(y);

        const auto& l = L_.back();
        for (int gy = 0; gy < kSide; ++gy) {
            for (int gx = 0; gx < kSide; ++gx) {
                const auto g = static_cast<std::size_t>(gy * kSide + gx);
                auto& v = v_[g];
                double s = kernel(grid_coord(gx), grid_coord(gy), x, y);
                for (std::size_t j = 0; j < n; ++j) s -= l[j] * v[j];
                s /= l[n];
                v.push_back(s);
                vv_[g] += s * s;
            }
        }
    }

    // Grid index with the largest expected improvement over `best` for
    // standardised targets `y`; ties keep the first in scan order.
    std::size_t argmax_ei(std::span<const double> y, double best) const {
        const std::size_t n = xs_.size();
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = y[i];
            for (std::size_t j = 0; j < i; ++j) s -= L_[i][j] * w[j];
            w[i] = s / L_[i][i];
        }
        constexpr double xi = 0.01;
        std::size_t arg = 0;
        double top = -1.0;
        for (std::size_t g = 0; g < v_.size(); ++g) {
            double mu = 0.0;
            for (std::size_t j = 0; j < n; ++j) mu += v_[g][j] * w[j];
            const double sd = std::sqrt(std::max(0.0, 1.0 - vv_[g]));
            const double gain = mu - best - xi;
            double ei = std::max(0.0, gain);
            if (sd > 1e-12) {
                const double z = gain / sd;
                ei = gain * normal_cdf(z) + sd * normal_pdf(z);
            }
            if (ei > top) {
                top = ei;
                arg = g;
            }
        }
        return arg;
    }

private:
    std::vector<std::vector<double>> L_;
    std::vector<double> xs_, ys_;
    std::vector<std::vector<double>> v_;
    std::vector<double> vv_;
};

}  // namespace detail

// Initial design: max(4, epochs / 10) shifted Halton points (bases 2 and 3),
// then one expected-improvement pick per remaining epoch.
inline SurrogateResult optimize_surrogate(const SurrogateObjective& objective, const SurrogateBounds& bounds,
                                          int epochs, std::uint64_t seed) {
    bounds.validate();
    if (epochs < 4) throw ParameterError("epochs must be >= 4");
    const auto to_cos = [&](double u) { return bounds.cos_lo + u * (bounds.cos_hi - bounds.cos_lo); };
    const auto to_tau = [&](double u) { return bounds.tau_lo_ms + u * (bounds.tau_hi_ms - bounds.tau_lo_ms); };

    SurrogateResult r;
    r.epochs = epochs;
    std::vector<double> acc;
    detail::GridGp gp;
    const auto evaluate = [&](double u, double v) {
        const Trial t{to_cos(u), to_tau(v), objective(to_cos(u), to_tau(v))};
        if (r.trials.empty() || t.accuracy > r.best.accuracy) r.best = t;
        r.trials.push_back(t);
        acc.push_back(t.accuracy);
        gp.add(u, v);
    };

    std::mt19937_64 rng(child_seed(seed, 0, 0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double shift_u = unit(rng);
    const double shift_v = unit(rng);
    const int initial = std::min(epochs, std::max(4, epochs / 10));
    for (int i = 1; i <= initial; ++i) {
        const double u = std::fmod(detail::radical_inverse(static_cast<std::uint64_t>(i), 2) + shift_u, 1.0);
        const double v = std::fmod(detail::radical_inverse(static_cast<std::uint64_t>(i), 3) + shift_v, 1.0);
        evaluate(u, v);
    }

    std::vector<double> z(acc.size());
    for (int e = initial; e < epochs; ++e) {
        const auto n = static_cast<double>(acc.size());
        double mean = 0.0;
        for (double a : acc) mean += a;
        mean /= n;
        double var = 0.0;
        for (double a : acc) var += (a - mean) * (a - mean);
        double sd = std::sqrt(var / n);
        if (sd < 1e-12) sd = 1.0;
        z.resize(acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i) z[i] = (acc[i] - mean) / sd;
        const double best = (r.best.accuracy - mean) / sd;

        const auto g = gp.argmax_ei(z, best);
        const int side = detail::GridGp::kSide;
        evaluate(detail::GridGp::grid_coord(static_cast<int>(g) % side),
                 detail::GridGp::grid_coord(static_cast<int>(g) / side));
    }
    return r;
}

// Leave-one-out accuracy of the spatiotemporal code, optionally on a
// stratified subsample of at most `per_class` samples per class.
inline SurrogateResult optimize_spatiotemporal(const Dataset& dataset, const SurrogateBounds& bounds, int epochs,
                                               std::uint64_t seed, std::size_t k, std::size_t per_class = 0) {
    bounds.validate();
    const Dataset d = subsample(dataset, per_class, seed);
    if (d.samples.size() < 2) throw ValidationError("optimisation needs at least 2 samples");
    const auto labels = label_indices(d);
    return optimize_surrogate(
        [&](double c, double tau_ms) {
            const double tau_s = tau_ms / 1000.0;
            const auto codes = encode_all(d, {EncoderKind::spatiotemporal, 1, tau_s});
            const MetricSpec metric{MetricKind::van_rossum, tau_s, c};
            return leave_one_out(pairwise_distances(codes, metric), labels, d.classes, k).accuracy;
        },
        bounds, epochs, seed);
}

// ---- logs -------------------------------------------------------------------

inline std::string sweep_log_csv(const SweepResult& r) {
    std::ostringstream out;
    out.precision(17);
    out << "delta_t_ms,accuracy\n";
    for (const auto& p : r.evaluated) out << p.value << ',' << p.accuracy << '\n';
    return out.str();
}

inline std::string trial_log_csv(const SurrogateResult& r) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,cos_theta,tau_ms,accuracy\n";
    for (std::size_t i = 0; i < r.trials.size(); ++i) {
        const auto& t = r.trials[i];
        out << i + 1 << ',' << t.cos_theta << ',' << t.tau_ms << ',' << t.accuracy << '\n';
    }
    return out.str();
}

}  // namespace neurotac
