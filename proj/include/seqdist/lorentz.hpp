#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "seqdist/distribution.hpp"
#include "seqdist/sequence.hpp"
#include "seqdist/weights.hpp"
#include "seqdist/window.hpp"

namespace seqdist {

/// Uniform-Cesàro diagnosis at finite horizon.
///
/// "almost-convergent" only means consistent with almost convergence at
/// every tested window length; a prefix can never prove it.
struct LorentzVerdict {
    double estimate = 0.0;    ///< midpoint of the largest window's mean range
    double uniform_gap = 0.0; ///< max_mean - min_mean at the largest window
    std::vector<double> gap_trend;
    Verdict verdict = Verdict::inconclusive;
    std::int64_t n_tail = 0; ///< largest window length
    CesaroProfile profile;

    /// Every observed window mean at the largest length lies within this of the estimate.
    double error_bound() const noexcept { return 0.5 * uniform_gap; }
};

/// Almost convergent iff every tail row's gap is <= tol.gap * 2M and the gap
/// does not grow across the tail; not almost convergent iff every tail
/// row's gap is >= tol.divergence_floor * 2M; inconclusive otherwise.
inline LorentzVerdict lorentz_verdict(const Prefix& p, const WindowSchedule& s, const Tolerances& tol = {}) {
    LorentzVerdict v;
    v.profile = cesaro_profile(p, s);
    for (const auto& row : v.profile.rows) v.gap_trend.push_back(row.gap());

    const auto& last = v.profile.rows.back();
    v.estimate = 0.5 * (last.min_mean + last.max_mean);
    v.uniform_gap = last.gap();
    v.n_tail = last.n;

    const std::size_t rows = v.gap_trend.size();
    const std::size_t used = std::min(std::max<std::size_t>(tol.tail_rows, 1), rows);
    const auto tail_begin = v.gap_trend.end() - static_cast<std::ptrdiff_t>(used);
    const double scale = 2.0 * p.bound();

    const bool small = std::all_of(tail_begin, v.gap_trend.end(), [&](double g) { return g <= tol.gap * scale; });
    const bool shrinking = v.gap_trend.back() <= *tail_begin;
    const bool stuck = std::all_of(tail_begin, v.gap_trend.end(),
                                   [&](double g) { return g >= tol.divergence_floor * scale && g > 0.0; });

    if (small && shrinking) v.verdict = Verdict::almost_convergent;
    else if (stuck) v.verdict = Verdict::not_almost_convergent;
    else v.verdict = Verdict::inconclusive;
    return v;
}

struct CrossValidationOptions {
    std::vector<double> meshes{1.0 / 16.0, 1.0 / 64.0};
    double value_tolerance = 0.0;
    double sublimit_epsilon_fraction = 0.005; ///< clustering radius as a fraction of 2M
};

/// Lorentz verdict joined with the weight-based estimates of the same prefix.
struct CrossValidation {
    LorentzVerdict lorentz;
    SimpleReport simple;
    std::optional<BanachEstimate> simple_estimate; ///< present when the prefix is simply distributed
    std::optional<SubLimitReport> sublimits;       ///< absent for the zero sequence (M = 0)
    std::optional<BanachEstimate> sublimit_estimate;
    BanachEstimate quantization;

    /// simple_estimate when available, the quantization estimate otherwise
    const BanachEstimate& weight_path() const { return simple_estimate ? *simple_estimate : quantization; }

    double difference = 0.0; ///< lorentz.estimate - weight_path().point
    bool consistent = false;
};

inline CrossValidation cross_validate(const Prefix& p, const WindowSchedule& s, const Tolerances& tol = {},
                                      const CrossValidationOptions& opt = {}) {
    CrossValidation out;
    out.lorentz = lorentz_verdict(p, s, tol);

    out.simple = is_simply_distributed(p, opt.value_tolerance, s, tol);
    if (out.simple.simply_distributed) out.simple_estimate = banach_limit_simply(out.simple);

    if (p.bound() > 0.0) {
        out.sublimits = detect_sublimits(p, opt.sublimit_epsilon_fraction * 2.0 * p.bound(), s, tol);
        out.sublimit_estimate = banach_limit_from_sublimits(*out.sublimits, tol);
    }
    out.quantization = banach_limit_via_quantization(p, opt.meshes, s, tol);

    const auto& wp = out.weight_path();
    out.difference = out.lorentz.estimate - wp.point;
    const double allowed = out.lorentz.error_bound() + wp.error_bound.value_or(0.0);
    const bool agree = std::abs(out.difference) <= allowed;
    const bool both_refuse = out.lorentz.verdict != Verdict::almost_convergent &&
                             wp.verdict != Verdict::almost_convergent;
    switch (out.lorentz.verdict) {
    case Verdict::almost_convergent: out.consistent = wp.verdict == Verdict::almost_convergent && agree; break;
    case Verdict::not_almost_convergent: out.consistent = both_refuse; break;
    case Verdict::inconclusive: out.consistent = both_refuse || agree; break;
    }
    return out;
}

inline CrossValidation cross_validate(const SequenceSpec& spec, std::int64_t horizon, const WindowSchedule& s,
                                      const Tolerances& tol = {}, const CrossValidationOptions& opt = {},
                                      std::int64_t max_horizon = kDefaultMaxHorizon) {
    return cross_validate(materialize(spec, horizon, max_horizon), s, tol, opt);
}

} // namespace seqdist
