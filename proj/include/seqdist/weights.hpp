#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "seqdist/error.hpp"
#include "seqdist/rational.hpp"
#include "seqdist/sequence.hpp"
#include "seqdist/window.hpp"

namespace seqdist {

/// Finite-scale thresholds shared by every estimator.
struct Tolerances {
    double gap = 0.02;               ///< max w_u - w_l (densities) or scaled by 2M (means)
    double trend = 0.01;             ///< max change between the last two rows
    double divergence_floor = 0.25;  ///< gap >= floor * 2M on every tail row => not almost convergent
    std::size_t tail_rows = 3;
    std::size_t value_cap = 64;
    double recurrence_window = 0.25; ///< a value must recur in the last quarter of the prefix
};

/// Strictly increasing indices within [1, horizon]. Houses a subsequence {x(n_k)}.
class IndexSet {
public:
    IndexSet(std::vector<std::int64_t> indices, std::int64_t horizon)
        : indices_(std::move(indices)), horizon_(horizon) {
        if (horizon_ < 1) throw Error(ErrorCode::invalid_argument, "index set horizon must be >= 1");
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            if (indices_[i] < 1 || indices_[i] > horizon_)
                throw Error(ErrorCode::index_out_of_range, "index " + std::to_string(indices_[i]) +
                                                               " outside [1, " + std::to_string(horizon_) + "]");
            if (i > 0 && indices_[i] <= indices_[i - 1])
                throw Error(ErrorCode::invalid_argument, "indices must be strictly increasing");
        }
    }

    static IndexSet from(const Membership& m) {
        std::vector<std::int64_t> idx;
        const auto bits = m.bits();
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) idx.push_back(static_cast<std::int64_t>(i) + 1);
        return IndexSet(std::move(idx), m.horizon());
    }

    Membership membership() const {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(horizon_), 0);
        for (auto n : indices_) bits[static_cast<std::size_t>(n - 1)] = 1;
        return Membership(std::move(bits));
    }

    std::span<const std::int64_t> indices() const noexcept { return indices_; }
    std::int64_t horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<std::int64_t> indices_;
    std::int64_t horizon_;
};

/// Finite-horizon surrogate of the lower and upper weights.
///
/// w_l_hat is the smallest min-density and w_u_hat the largest max-density
/// over the last `tail_rows_used` schedule rows (liminf/limsup surrogates).
/// Values are prefix-relative: the true sup over all offsets may be larger.
struct WeightEstimate {
    Rational w_l_hat{0};
    Rational w_u_hat{0};
    DensityProfile per_window;
    bool converged = false;
    std::size_t tail_rows_used = 0;
    std::int64_t n_tail = 0; ///< shortest window among the tail rows

    Rational gap() const { return w_u_hat - w_l_hat; }
    double point() const { return 0.5 * (w_l_hat.to_double() + w_u_hat.to_double()); }
};

/// Turns a density profile into a weight estimate.
inline WeightEstimate estimate_from_profile(DensityProfile profile, const Tolerances& tol = {}) {
    WeightEstimate w;
    const std::size_t rows = profile.rows.size();
    const std::size_t used = std::min(std::max<std::size_t>(tol.tail_rows, 1), rows);
    const std::size_t first = rows - used;

    w.w_l_hat = profile.rows[first].min_density();
    w.w_u_hat = profile.rows[first].max_density();
    w.n_tail = profile.rows[first].n;
    for (std::size_t r = first + 1; r < rows; ++r) {
        w.w_l_hat = min(w.w_l_hat, profile.rows[r].min_density());
        w.w_u_hat = max(w.w_u_hat, profile.rows[r].max_density());
        w.n_tail = std::min(w.n_tail, profile.rows[r].n);
    }
    w.tail_rows_used = used;

    bool trend_ok = true;
    if (rows >= 2) {
        const auto& last = profile.rows[rows - 1];
        const auto& prev = profile.rows[rows - 2];
        trend_ok = std::abs(last.max_density().to_double() - prev.max_density().to_double()) <= tol.trend &&
                   std::abs(last.min_density().to_double() - prev.min_density().to_double()) <= tol.trend;
    }
    w.converged = w.gap().to_double() <= tol.gap && trend_ok;
    w.per_window = std::move(profile);
    return w;
}

inline WeightEstimate membership_weights(const Membership& m, const WindowSchedule& s, const Tolerances& tol = {}) {
    return estimate_from_profile(density_profile(m, s), tol);
}

inline WeightEstimate subsequence_weights(const IndexSet& idx, const WindowSchedule& s, const Tolerances& tol = {}) {
    return membership_weights(idx.membership(), s, tol);
}

/// Every index with x(n) in [a - eps0, a + eps0).
///
/// When a is an isolated sub-limit and eps0 is below its separation from the
/// rest of S(x), this is an essential subsequence of a. The caller checks
/// isolation; detect_sublimits reports it.
inline IndexSet essential_indices(const Prefix& p, double a, double epsilon0) {
    if (!(epsilon0 > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon0 must be positive");
    const double lo = a - epsilon0, hi = a + epsilon0;
    std::vector<std::int64_t> idx;
    for (std::int64_t n = 1; n <= p.horizon(); ++n)
        if (p(n) >= lo && p(n) < hi) idx.push_back(n);
    return IndexSet(std::move(idx), p.horizon());
}

/// Weight of {n : x(n) in [a - eps, a + eps)}; equals w(a) for an isolated a
/// with separation >= eps.
inline WeightEstimate sublimit_weight(const Prefix& p, double a, double epsilon, const WindowSchedule& s,
                                      const Tolerances& tol = {}) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
    const double lo = a - epsilon, hi = a + epsilon;
    return membership_weights(Membership::of(p, [&](double v) { return v >= lo && v < hi; }), s, tol);
}

struct SubLimitCluster {
    double center = 0.0;
    double radius = 0.0; ///< half the spread of member values
    std::int64_t occurrences = 0;
    std::int64_t last_index = 0;
    bool isolated = false;
    WeightEstimate weight;
};

struct SubLimitReport {
    std::vector<SubLimitCluster> clusters; ///< recurrent clusters only, ascending by center
    std::int64_t residual_count = 0;       ///< terms in clusters that did not recur
    std::int64_t horizon = 0;
    double epsilon = 0.0;

    Rational residual_mass() const { return Rational(residual_count, horizon); }
};

/// Clusters prefix values into groups of spread < 2 * epsilon, scanning in
/// ascending order. A cluster counts as a candidate sub-limit only if some
/// member index lies in the last `recurrence_window` fraction of the prefix;
/// the rest is residual mass. A candidate is isolated when no other
/// candidate center lies within 3 * epsilon.
inline SubLimitReport detect_sublimits(const Prefix& p, double epsilon, const WindowSchedule& s,
                                       const Tolerances& tol = {}) {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
    if (!(tol.recurrence_window > 0.0 && tol.recurrence_window <= 1.0))
        throw Error(ErrorCode::invalid_argument, "recurrence window must lie in (0, 1]");
    if (epsilon >= 2.0 * p.bound())
        throw Error(ErrorCode::degenerate_epsilon, "epsilon " + std::to_string(epsilon) + " >= 2M");
    s.check_fits(p.horizon());

    const std::int64_t horizon = p.horizon();
    std::vector<std::int64_t> order(static_cast<std::size_t>(horizon));
    std::iota(order.begin(), order.end(), std::int64_t{1});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p(a) < p(b); });

    const double recurrence_cut = (1.0 - tol.recurrence_window) * static_cast<double>(horizon);

    SubLimitReport report;
    report.horizon = horizon;
    report.epsilon = epsilon;

    std::size_t i = 0;
    while (i < order.size()) {
        const double first = p(order[i]);
        std::size_t j = i;
        while (j < order.size() && p(order[j]) < first + 2.0 * epsilon) ++j;

        std::vector<std::int64_t> members(order.begin() + static_cast<std::ptrdiff_t>(i),
                                          order.begin() + static_cast<std::ptrdiff_t>(j));
        std::sort(members.begin(), members.end());
        const double last = p(order[j - 1]);
        const auto count = static_cast<std::int64_t>(members.size());

        if (static_cast<double>(members.back()) > recurrence_cut) {
            SubLimitCluster c;
            c.center = 0.5 * (first + last);
            c.radius = 0.5 * (last - first);
            c.occurrences = count;
            c.last_index = members.back();
            c.weight = subsequence_weights(IndexSet(std::move(members), horizon), s, tol);
            report.clusters.push_back(std::move(c));
        } else {
            report.residual_count += count;
        }
        i = j;
    }

    for (std::size_t k = 0; k < report.clusters.size(); ++k) {
        bool isolated = true;
        for (std::size_t q = 0; q < report.clusters.size(); ++q)
            if (q != k && std::abs(report.clusters[q].center - report.clusters[k].center) <= 3.0 * epsilon)
                isolated = false;
        report.clusters[k].isolated = isolated;
    }
    return report;
}

} // namespace seqdist
