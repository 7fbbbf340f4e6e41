#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqdist/error.hpp"
#include "seqdist/rational.hpp"
#include "seqdist/sequence.hpp"
#include "seqdist/weights.hpp"
#include "seqdist/window.hpp"

namespace seqdist {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Finite disjoint union of half-open intervals [lo, hi) inside [-M, M].
///
/// The interval whose right end is +M may additionally contain +M itself
/// (`top_closed`); otherwise the supremum could never be counted.
class IntervalSet {
public:
    IntervalSet() = default;

    IntervalSet(std::vector<Interval> intervals, double bound, bool top_closed)
        : intervals_(std::move(intervals)), bound_(bound), top_closed_(top_closed) {
        for (std::size_t i = 0; i < intervals_.size(); ++i) {
            const auto& iv = intervals_[i];
            if (!(iv.lo < iv.hi)) throw Error(ErrorCode::invalid_argument, "interval with lo >= hi");
            if (iv.lo < -bound_ || iv.hi > bound_)
                throw Error(ErrorCode::value_out_of_bounds, "interval leaves [-M, M]");
            if (i > 0 && iv.lo < intervals_[i - 1].hi)
                throw Error(ErrorCode::invalid_argument, "intervals must be sorted and disjoint");
        }
    }

    /// Clips arbitrary half-open intervals to [-M, M]. An interval reaching
    /// past +M keeps +M (top_closed); empty pieces are dropped.
    static IntervalSet clipped(std::vector<Interval> raw, double bound) {
        std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> out;
        bool top = false;
        for (const auto& iv : raw) {
            if (!(iv.lo < iv.hi)) throw Error(ErrorCode::invalid_argument, "interval with lo >= hi");
            if (iv.hi > bound) top = true;
            Interval c{std::max(iv.lo, -bound), std::min(iv.hi, bound)};
            if (c.lo < c.hi) out.push_back(c);
        }
        for (std::size_t i = 1; i < out.size(); ++i)
            if (out[i].lo < out[i - 1].hi) throw Error(ErrorCode::invalid_argument, "intervals overlap");
        return IntervalSet(std::move(out), bound, top && !out.empty() && out.back().hi == bound);
    }

    bool contains(double x) const {
        for (const auto& iv : intervals_) {
            if (x >= iv.lo && x < iv.hi) return true;
            if (top_closed_ && iv.hi == bound_ && x == bound_) return true;
        }
        return false;
    }

    std::span<const Interval> intervals() const noexcept { return intervals_; }
    bool top_closed() const noexcept { return top_closed_; }
    double bound() const noexcept { return bound_; }
    bool empty() const noexcept { return intervals_.empty(); }

private:
    std::vector<Interval> intervals_;
    double bound_ = 0.0;
    bool top_closed_ = false;
};

/// Points a_0 < a_1 < ... < a_m. Cells are [a_j, a_{j+1}); the last cell is
/// closed so a value equal to a_m lands in it.
class Partition {
public:
    explicit Partition(std::vector<double> points) : points_(std::move(points)) {
        if (points_.size() < 2) throw Error(ErrorCode::invalid_argument, "partition needs at least two points");
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i] > points_[i - 1]))
                throw Error(ErrorCode::invalid_argument, "partition points must be strictly increasing");
            mesh_ = std::max(mesh_, points_[i] - points_[i - 1]);
        }
    }

    static Partition uniform(double lo, double hi, std::size_t cells) {
        if (cells == 0 || !(lo < hi)) throw Error(ErrorCode::invalid_argument, "bad uniform partition");
        std::vector<double> pts(cells + 1);
        for (std::size_t j = 0; j <= cells; ++j)
            pts[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(cells);
        pts.back() = hi;
        return Partition(std::move(pts));
    }

    /// Uniform partition of [-M, M] with spacing strictly below `mesh`.
    static Partition covering(double bound, double mesh) {
        if (!(mesh > 0.0)) throw Error(ErrorCode::invalid_argument, "mesh must be positive");
        if (bound == 0.0) return Partition({0.0, mesh / 2.0});
        const auto cells = static_cast<std::size_t>(std::floor(2.0 * bound / mesh)) + 1;
        return uniform(-bound, bound, cells);
    }

    std::span<const double> points() const noexcept { return points_; }
    std::size_t cells() const noexcept { return points_.size() - 1; }
    double mesh() const noexcept { return mesh_; }
    double lo() const noexcept { return points_.front(); }
    double hi() const noexcept { return points_.back(); }

    /// Index j of the cell holding x, or nullopt when x is outside [a_0, a_m].
    std::optional<std::size_t> cell_of(double x) const {
        if (!(x >= points_.front() && x <= points_.back())) return std::nullopt;
        if (x == points_.back()) return cells() - 1;
        const auto it = std::upper_bound(points_.begin(), points_.end(), x);
        return static_cast<std::size_t>(it - points_.begin()) - 1;
    }

private:
    std::vector<double> points_;
    double mesh_ = 0.0;
};

enum class Verdict { almost_convergent, not_almost_convergent, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::almost_convergent: return "almost-convergent";
    case Verdict::not_almost_convergent: return "not-almost-convergent";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

enum class Method { simple_sum, thm4_bounds, quantization, cesaro };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::simple_sum: return "simple-sum";
    case Method::thm4_bounds: return "thm4-bounds";
    case Method::quantization: return "quantization";
    case Method::cesaro: return "cesaro";
    }
    return "unknown";
}

struct SimpleReport {
    std::vector<double> values; ///< ascending, distinct
    std::vector<WeightEstimate> weights;
    Rational residual_mass{0};
    std::size_t distinct_count = 0;
    bool capped = false; ///< too many distinct values; no weights computed
    bool simply_distributed = false;

    double weight_sum() const {
        double s = 0.0;
        for (const auto& w : weights) s += w.point();
        return s;
    }
};

/// One refinement level of the quantization estimator.
struct MeshStep {
    double mesh = 0.0;
    std::size_t cells = 0;
    std::size_t occupied_cells = 0;
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool simply_distributed = false;
};

struct BanachEstimate {
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::optional<double> error_bound;
    Method method = Method::simple_sum;
    Verdict verdict = Verdict::inconclusive;
    std::vector<MeshStep> steps; ///< quantization only
};

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

inline WeightEstimate set_weight(const Prefix& p, const IntervalSet& S, const WindowSchedule& s,
                                 const Tolerances& tol = {}) {
    for (const auto& iv : S.intervals())
        if (iv.lo < -p.bound() || iv.hi > p.bound())
            throw Error(ErrorCode::value_out_of_bounds, "interval set leaves [-M, M]");
    return membership_weights(Membership::of(p, [&](double v) { return S.contains(v); }), s, tol);
}

namespace detail {

/// Weight estimates for each distinct label in `labels` (values are sorted ascending).
inline SimpleReport simple_report_from_labels(const std::vector<std::size_t>& labels, std::vector<double> values,
                                              const WindowSchedule& s, const Tolerances& tol) {
    SimpleReport r;
    r.distinct_count = values.size();
    r.values = std::move(values);
    r.weights.reserve(r.values.size());
    std::vector<std::uint8_t> bits(labels.size());
    for (std::size_t v = 0; v < r.values.size(); ++v) {
        for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = labels[i] == v ? 1 : 0;
        r.weights.push_back(membership_weights(Membership(bits), s, tol));
    }
    const bool all_converged =
        std::all_of(r.weights.begin(), r.weights.end(), [](const auto& w) { return w.converged; });
    const double sum = r.weight_sum();
    r.simply_distributed = all_converged && sum >= 1.0 - tol.gap && sum <= 1.0 + tol.gap;
    return r;
}

} // namespace detail

/// Collects distinct values (merging runs within value_tolerance of a run's
/// smallest member) and estimates a weight for each. The verdict requires
/// at most `tol.value_cap` values, every weight converged, and the weights
/// summing to 1 within tol.gap.
inline SimpleReport is_simply_distributed(const Prefix& p, double value_tolerance, const WindowSchedule& s,
                                          const Tolerances& tol = {}) {
    if (!(value_tolerance >= 0.0)) throw Error(ErrorCode::invalid_argument, "value tolerance must be >= 0");
    s.check_fits(p.horizon());

    std::vector<double> sorted(p.values().begin(), p.values().end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> reps;
    for (double v : sorted)
        if (reps.empty() || v > reps.back() + value_tolerance) reps.push_back(v);

    if (reps.size() > tol.value_cap) {
        SimpleReport r;
        r.distinct_count = reps.size();
        r.capped = true;
        r.residual_mass = Rational(1);
        return r;
    }

    std::vector<std::size_t> labels(static_cast<std::size_t>(p.horizon()));
    for (std::int64_t n = 1; n <= p.horizon(); ++n) {
        // last representative <= x(n); x(n) is within value_tolerance of it
        const auto it = std::upper_bound(reps.begin(), reps.end(), p(n));
        labels[static_cast<std::size_t>(n - 1)] = static_cast<std::size_t>(it - reps.begin()) - 1;
    }
    return detail::simple_report_from_labels(labels, std::move(reps), s, tol);
}

/// Left-endpoint quantization: x(n) in [a_j, a_{j+1}) maps to a_j.
inline Prefix quantize(const Prefix& p, const Partition& T) {
    std::vector<double> out(static_cast<std::size_t>(p.horizon()));
    for (std::int64_t n = 1; n <= p.horizon(); ++n) {
        const auto cell = T.cell_of(p(n));
        if (!cell)
            throw Error(ErrorCode::value_out_of_bounds, "x(" + std::to_string(n) + ") = " + std::to_string(p(n)) +
                                                            " lies outside the partition");
        out[static_cast<std::size_t>(n - 1)] = T.points()[*cell];
    }
    const double bound = std::max({p.bound(), std::abs(T.lo()), std::abs(T.points()[T.cells() - 1])});
    return Prefix(std::move(out), bound);
}

/// Two-sided bound on L(x) from finitely many values with weight estimates:
/// positive values contribute a * w_l below and a * w_u above, negative
/// values the reverse, zero nothing.
inline Bounds banach_limit_bounds(const std::vector<std::pair<double, WeightEstimate>>& values_and_weights) {
    std::vector<double> seen;
    Bounds b;
    for (const auto& [a, w] : values_and_weights) {
        if (std::find(seen.begin(), seen.end(), a) != seen.end())
            throw Error(ErrorCode::invalid_argument, "values must be distinct");
        seen.push_back(a);
        const double wl = w.w_l_hat.to_double(), wu = w.w_u_hat.to_double();
        if (a > 0.0) {
            b.lower += a * wl;
            b.upper += a * wu;
        } else if (a < 0.0) {
            b.lower += a * wu;
            b.upper += a * wl;
        }
    }
    return b;
}

/// L(s) = sum a_j w(s, a_j) for a simply distributed s, with weights taken at
/// the midpoint of their estimate.
inline BanachEstimate banach_limit_simply(const SimpleReport& r) {
    if (!r.simply_distributed)
        throw Error(ErrorCode::not_simply_distributed, "report does not certify a simply distributed prefix");
    std::vector<std::pair<double, WeightEstimate>> vw;
    vw.reserve(r.values.size());
    BanachEstimate e;
    for (std::size_t j = 0; j < r.values.size(); ++j) {
        vw.emplace_back(r.values[j], r.weights[j]);
        e.point += r.values[j] * r.weights[j].point();
    }
    const auto b = banach_limit_bounds(vw);
    e.lower = b.lower;
    e.upper = b.upper;
    e.error_bound = std::max({0.0, e.upper - e.point, e.point - e.lower});
    e.method = Method::simple_sum;
    e.verdict = Verdict::almost_convergent;
    return e;
}

/// Quantizes the prefix at each mesh (uniform cells of width < mesh over
/// [-M, M]), estimates L of each quantized prefix from its cell weights, and
/// reports the finest level. Almost convergent iff every level is simply
/// distributed and successive points differ by less than the sum of their
/// meshes; inconclusive otherwise.
inline BanachEstimate banach_limit_via_quantization(const Prefix& p, const std::vector<double>& meshes,
                                                    const WindowSchedule& s, const Tolerances& tol = {}) {
    if (meshes.empty()) throw Error(ErrorCode::invalid_argument, "empty mesh schedule");
    for (std::size_t k = 0; k < meshes.size(); ++k) {
        if (!(meshes[k] > 0.0)) throw Error(ErrorCode::invalid_argument, "meshes must be positive");
        if (k > 0 && !(meshes[k] < meshes[k - 1]))
            throw Error(ErrorCode::invalid_argument, "meshes must be strictly decreasing");
    }
    s.check_fits(p.horizon());

    BanachEstimate e;
    e.method = Method::quantization;
    bool all_simple = true;
    bool stable = true;

    for (double mesh : meshes) {
        const auto T = Partition::covering(p.bound(), mesh);
        std::vector<std::size_t> cell(static_cast<std::size_t>(p.horizon()));
        std::map<std::size_t, std::size_t> occupied; // cell -> label
        for (std::int64_t n = 1; n <= p.horizon(); ++n) {
            const auto c = T.cell_of(p(n));
            if (!c) throw Error(ErrorCode::value_out_of_bounds, "value outside [-M, M]");
            cell[static_cast<std::size_t>(n - 1)] = *c;
            occupied.emplace(*c, 0);
        }
        std::vector<double> values;
        for (auto& [c, label] : occupied) {
            label = values.size();
            values.push_back(T.points()[c]);
        }
        for (auto& c : cell) c = occupied.at(c);

        auto report = detail::simple_report_from_labels(cell, std::move(values), s, tol);
        MeshStep step;
        step.mesh = mesh;
        step.cells = T.cells();
        step.occupied_cells = report.values.size();
        step.simply_distributed = report.simply_distributed;
        std::vector<std::pair<double, WeightEstimate>> vw;
        for (std::size_t j = 0; j < report.values.size(); ++j) {
            step.point += report.values[j] * report.weights[j].point();
            vw.emplace_back(report.values[j], std::move(report.weights[j]));
        }
        const auto b = banach_limit_bounds(vw);
        step.lower = b.lower;
        step.upper = b.upper;

        all_simple = all_simple && step.simply_distributed;
        if (!e.steps.empty() && !(std::abs(step.point - e.steps.back().point) < mesh + e.steps.back().mesh))
            stable = false;
        e.steps.push_back(step);
    }

    const auto& last = e.steps.back();
    e.point = last.point;
    e.error_bound = last.mesh + (last.upper - last.lower);
    e.lower = e.point - *e.error_bound;
    e.upper = e.point + *e.error_bound;
    e.verdict = all_simple && stable ? Verdict::almost_convergent : Verdict::inconclusive;
    return e;
}

inline BanachEstimate banach_limit_via_quantization(const SequenceSpec& spec, std::int64_t horizon,
                                                    const std::vector<double>& meshes, const WindowSchedule& s,
                                                    const Tolerances& tol = {},
                                                    std::int64_t max_horizon = kDefaultMaxHorizon) {
    return banach_limit_via_quantization(materialize(spec, horizon, max_horizon), meshes, s, tol);
}

/// Estimate built from detected sub-limit clusters: centers weighted by
/// their estimated weights, with the two-sided bound around it.
inline BanachEstimate banach_limit_from_sublimits(const SubLimitReport& r, const Tolerances& tol = {}) {
    std::vector<std::pair<double, WeightEstimate>> vw;
    BanachEstimate e;
    e.method = Method::thm4_bounds;
    bool converged = true;
    for (const auto& c : r.clusters) {
        vw.emplace_back(c.center, c.weight);
        e.point += c.center * c.weight.point();
        converged = converged && c.weight.converged;
    }
    const auto b = banach_limit_bounds(vw);
    e.lower = b.lower;
    e.upper = b.upper;
    e.point = std::clamp(e.point, e.lower, e.upper);
    e.error_bound = std::max(e.upper - e.point, e.point - e.lower);
    double mass = 0.0;
    for (const auto& c : r.clusters) mass += c.weight.point();
    const bool mass_ok = std::abs(mass - 1.0) <= tol.gap;
    e.verdict = converged && mass_ok ? Verdict::almost_convergent : Verdict::inconclusive;
    return e;
}

/// Weight left for the unique limit point p of S(x) once the other
/// sub-limits are accounted for: w(p) = 1 - sum w(a).
inline WeightEstimate limit_point_weight(const std::vector<std::pair<double, WeightEstimate>>& known,
                                         double p_candidate, const Tolerances& tol = {}) {
    Rational sum_l{0}, sum_u{0};
    for (const auto& [a, w] : known) {
        if (a == p_candidate)
            throw Error(ErrorCode::invalid_argument, "the limit point must not be among the known values");
        if (!w.converged) throw Error(ErrorCode::invalid_argument, "known weights must have converged");
        sum_l = sum_l + w.w_l_hat;
        sum_u = sum_u + w.w_u_hat;
    }
    if (sum_l.to_double() > 1.0 + tol.gap)
        throw Error(ErrorCode::overweight, "known lower weights sum to " + std::to_string(sum_l.to_double()));

    const Rational zero{0}, one{1};
    WeightEstimate out;
    out.w_l_hat = max(zero, one - sum_u);
    out.w_u_hat = min(one, max(zero, one - sum_l));
    out.w_l_hat = min(out.w_l_hat, out.w_u_hat);
    out.converged = out.gap().to_double() <= tol.gap;
    return out;
}

} // namespace seqdist
