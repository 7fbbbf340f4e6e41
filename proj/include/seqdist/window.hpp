#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqdist/error.hpp"
#include "seqdist/rational.hpp"
#include "seqdist/sequence.hpp"

namespace seqdist {

/// 0/1 indicator over indices 1..N.
class Membership {
public:
    Membership() = default;
    explicit Membership(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto& b : bits_) b = b ? 1 : 0;
    }

    static Membership empty(std::int64_t horizon) {
        return Membership(std::vector<std::uint8_t>(static_cast<std::size_t>(horizon), 0));
    }

    template <typename Pred>
    static Membership of(const Prefix& p, Pred&& pred) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(p.horizon()));
        const auto v = p.values();
        for (std::size_t i = 0; i < v.size(); ++i) bits[i] = pred(v[i]) ? 1 : 0;
        return Membership(std::move(bits));
    }

    std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(bits_.size()); }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    /// 1-based.
    bool contains(std::int64_t n) const { return bits_[static_cast<std::size_t>(n - 1)] != 0; }
    std::int64_t count() const {
        std::int64_t c = 0;
        for (auto b : bits_) c += b;
        return c;
    }

private:
    std::vector<std::uint8_t> bits_;
};

/// Strictly increasing window lengths n_1 < ... < n_m, all <= horizon.
class WindowSchedule {
public:
    explicit WindowSchedule(std::vector<std::int64_t> lengths) : lengths_(std::move(lengths)) {
        if (lengths_.empty()) throw Error(ErrorCode::invalid_schedule, "empty window schedule");
        if (lengths_.front() < 1) throw Error(ErrorCode::invalid_schedule, "window length must be >= 1");
        for (std::size_t i = 1; i < lengths_.size(); ++i)
            if (lengths_[i] <= lengths_[i - 1])
                throw Error(ErrorCode::invalid_schedule, "window lengths must be strictly increasing");
    }

    /// ceil(base * ratio^t) for t = 0, 1, ... while <= limit; duplicates collapse.
    static WindowSchedule geometric(double base, double ratio, std::int64_t limit) {
        if (!(base >= 1.0) || !(ratio > 1.0))
            throw Error(ErrorCode::invalid_schedule, "geometric schedule needs base >= 1 and ratio > 1");
        std::vector<std::int64_t> out;
        for (double x = base;; x *= ratio) {
            const auto n = static_cast<std::int64_t>(std::ceil(x - 1e-9));
            if (n > limit) break;
            if (out.empty() || n > out.back()) out.push_back(n);
        }
        if (out.empty())
            throw Error(ErrorCode::invalid_schedule, "no window length of the geometric schedule fits under " +
                                                         std::to_string(limit));
        return WindowSchedule(std::move(out));
    }

    /// 16 * 2^t up to N/4.
    static WindowSchedule default_for(std::int64_t horizon) { return geometric(16.0, 2.0, horizon / 4); }

    std::span<const std::int64_t> lengths() const noexcept { return lengths_; }
    std::size_t size() const noexcept { return lengths_.size(); }
    std::int64_t largest() const noexcept { return lengths_.back(); }

    void check_fits(std::int64_t horizon) const {
        if (lengths_.back() > horizon)
            throw Error(ErrorCode::window_too_long, "window length " + std::to_string(lengths_.back()) +
                                                        " exceeds horizon " + std::to_string(horizon));
    }

private:
    std::vector<std::int64_t> lengths_;
};

struct CountExtrema {
    std::int64_t min_count = 0;
    std::int64_t max_count = 0;
    friend bool operator==(const CountExtrema&, const CountExtrema&) = default;
};

struct MeanExtrema {
    double min_mean = 0.0;
    double max_mean = 0.0;
};

struct DensityRow {
    std::int64_t n = 0;
    std::int64_t min_count = 0;
    std::int64_t max_count = 0;
    std::int64_t offsets_scanned = 0;

    Rational min_density() const { return Rational(min_count, n); }
    Rational max_density() const { return Rational(max_count, n); }
};

/// Counts are prefix-relative: offsets range over windows fully inside [1, N].
struct DensityProfile {
    std::int64_t horizon = 0;
    std::vector<DensityRow> rows;
};

struct CesaroRow {
    std::int64_t n = 0;
    double min_mean = 0.0;
    double max_mean = 0.0;
    double gap() const noexcept { return max_mean - min_mean; }
};

struct CesaroProfile {
    std::int64_t horizon = 0;
    std::vector<CesaroRow> rows;
};

namespace detail {

inline void check_window(std::int64_t n, std::int64_t horizon) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "window length must be >= 1");
    if (n > horizon)
        throw Error(ErrorCode::window_too_long,
                    "window length " + std::to_string(n) + " exceeds horizon " + std::to_string(horizon));
}

/// prefix[i] = number of set bits among the first i entries.
inline std::vector<std::int64_t> count_prefix(const Membership& m) {
    const auto bits = m.bits();
    std::vector<std::int64_t> prefix(bits.size() + 1, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) prefix[i + 1] = prefix[i] + bits[i];
    return prefix;
}

inline CountExtrema count_extrema_from_prefix(std::span<const std::int64_t> prefix, std::int64_t n) {
    const auto horizon = static_cast<std::int64_t>(prefix.size()) - 1;
    CountExtrema out{n, 0};
    for (std::int64_t i = 0; i + n <= horizon; ++i) {
        const std::int64_t c = prefix[static_cast<std::size_t>(i + n)] - prefix[static_cast<std::size_t>(i)];
        out.min_count = std::min(out.min_count, c);
        out.max_count = std::max(out.max_count, c);
    }
    return out;
}

/// Long-double running sums; rounding error per window is on the order of N * ulp(M).
inline std::vector<long double> value_prefix(std::span<const double> v) {
    std::vector<long double> prefix(v.size() + 1, 0.0L);
    for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + static_cast<long double>(v[i]);
    return prefix;
}

inline MeanExtrema mean_extrema_from_prefix(std::span<const long double> prefix, std::int64_t n) {
    const auto horizon = static_cast<std::int64_t>(prefix.size()) - 1;
    long double lo = prefix[static_cast<std::size_t>(n)] - prefix[0];
    long double hi = lo;
    for (std::int64_t i = 1; i + n <= horizon; ++i) {
        const long double s = prefix[static_cast<std::size_t>(i + n)] - prefix[static_cast<std::size_t>(i)];
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const auto len = static_cast<long double>(n);
    return {static_cast<double>(lo / len), static_cast<double>(hi / len)};
}

} // namespace detail

/// Min and max number of members over all windows [i, i+n-1] inside [1, N]. O(N).
inline CountExtrema count_extrema(const Membership& m, std::int64_t n) {
    detail::check_window(n, m.horizon());
    const auto prefix = detail::count_prefix(m);
    return detail::count_extrema_from_prefix(prefix, n);
}

/// Brute-force O(N * n) recount of every window. Test oracle for count_extrema.
inline CountExtrema naive_count_extrema(const Membership& m, std::int64_t n) {
    detail::check_window(n, m.horizon());
    const auto bits = m.bits();
    CountExtrema out{n, 0};
    for (std::int64_t i = 0; i + n <= m.horizon(); ++i) {
        std::int64_t c = 0;
        for (std::int64_t k = i; k < i + n; ++k) c += bits[static_cast<std::size_t>(k)];
        out.min_count = std::min(out.min_count, c);
        out.max_count = std::max(out.max_count, c);
    }
    return out;
}

inline MeanExtrema mean_extrema(const Prefix& p, std::int64_t n) {
    detail::check_window(n, p.horizon());
    const auto prefix = detail::value_prefix(p.values());
    return detail::mean_extrema_from_prefix(prefix, n);
}

inline DensityProfile density_profile(const Membership& m, const WindowSchedule& s) {
    s.check_fits(m.horizon());
    const auto prefix = detail::count_prefix(m);
    DensityProfile out{m.horizon(), {}};
    out.rows.reserve(s.size());
    for (std::int64_t n : s.lengths()) {
        const auto e = detail::count_extrema_from_prefix(prefix, n);
        out.rows.push_back({n, e.min_count, e.max_count, m.horizon() - n + 1});
    }
    return out;
}

inline CesaroProfile cesaro_profile(const Prefix& p, const WindowSchedule& s) {
    s.check_fits(p.horizon());
    const auto prefix = detail::value_prefix(p.values());
    CesaroProfile out{p.horizon(), {}};
    out.rows.reserve(s.size());
    for (std::int64_t n : s.lengths()) {
        const auto e = detail::mean_extrema_from_prefix(prefix, n);
        out.rows.push_back({n, e.min_mean, e.max_mean});
    }
    return out;
}

} // namespace seqdist
