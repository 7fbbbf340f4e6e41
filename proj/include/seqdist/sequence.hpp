#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "seqdist/error.hpp"

namespace seqdist {

/// Largest horizon materialize() accepts unless the caller passes its own cap.
inline constexpr std::int64_t kDefaultMaxHorizon = std::int64_t{1} << 26;

class SequenceSpec;

namespace gen {

/// x(n) = pattern[(n-1) mod p]
struct Periodic {
    std::vector<double> pattern;
};

/// x(n) = 1 for n <= n0, 0 afterwards.
struct OnesThenZeros {
    std::int64_t n0 = 1;
};

/// x(n) = frac(n * alpha). Direct evaluation; loses precision once n * alpha
/// approaches 2^53.
struct Rotation {
    double alpha = 0.0;
};

/// Block t (t >= 0) has length growth^t and constant value values[t mod |values|].
/// The defaults give 0, 1 1, 0 0 0 0, 1 1 1 1 1 1 1 1, ...
struct DoublingBlocks {
    std::int64_t growth = 2;
    std::vector<double> values{0.0, 1.0};
};

/// x(n) = 1/j where j - 1 is the 2-adic valuation of n.
struct DyadicHarmonic {};

/// Explicit values x(1..len); undefined beyond the table.
struct Table {
    std::vector<double> values;
};

struct Term {
    double coefficient = 1.0;
    std::shared_ptr<const SequenceSpec> child;
};

/// x(n) = sum_k c_k * child_k(n), evaluated lazily.
struct AffineCombo {
    std::vector<Term> terms;
};

} // namespace gen

enum class Kind { periodic, ones_then_zeros, rotation, doubling_blocks, dyadic_harmonic, table, affine_combo };

inline const char* to_string(Kind k) {
    switch (k) {
    case Kind::periodic: return "periodic";
    case Kind::ones_then_zeros: return "ones-then-zeros";
    case Kind::rotation: return "rotation";
    case Kind::doubling_blocks: return "doubling-blocks";
    case Kind::dyadic_harmonic: return "dyadic-harmonic";
    case Kind::table: return "table";
    case Kind::affine_combo: return "affine-combo";
    }
    return "unknown";
}

/// 2-adic valuation of a positive integer.
inline int two_adic_valuation(std::int64_t n) { return std::countr_zero(static_cast<std::uint64_t>(n)); }

/// A finitely-described bounded real sequence x(1), x(2), ...
///
/// Immutable once built. The bound is certified from the generator at
/// construction; a caller may only widen it. `offset` implements the
/// translation operator: eval(n) reads the generator at n + offset.
class SequenceSpec {
public:
    using Generator = std::variant<gen::Periodic, gen::OnesThenZeros, gen::Rotation, gen::DoublingBlocks,
                                   gen::DyadicHarmonic, gen::Table, gen::AffineCombo>;

    explicit SequenceSpec(Generator g, std::int64_t offset = 0, std::string name = {})
        : gen_(std::move(g)), offset_(offset), name_(std::move(name)) {
        if (offset_ < 0) throw Error(ErrorCode::invalid_spec, "negative offset");
        validate();
        bound_ = certified_bound();
    }

    SequenceSpec(Generator g, double bound, std::int64_t offset, std::string name = {})
        : SequenceSpec(std::move(g), offset, std::move(name)) {
        if (!(bound >= bound_))
            throw Error(ErrorCode::invalid_spec, "declared bound " + std::to_string(bound) +
                                                     " is below the certified bound " + std::to_string(bound_));
        bound_ = bound;
    }

    Kind kind() const noexcept { return static_cast<Kind>(gen_.index()); }
    const Generator& generator() const noexcept { return gen_; }
    double bound() const noexcept { return bound_; }
    std::int64_t offset() const noexcept { return offset_; }
    const std::string& name() const noexcept { return name_; }

    /// Last index for which eval is defined, or -1 when unbounded.
    std::int64_t length() const {
        if (const auto* t = std::get_if<gen::Table>(&gen_))
            return static_cast<std::int64_t>(t->values.size()) - offset_;
        if (const auto* a = std::get_if<gen::AffineCombo>(&gen_)) {
            std::int64_t len = -1;
            for (const auto& term : a->terms) {
                const std::int64_t child = term.child->length();
                if (child >= 0) len = len < 0 ? child - offset_ : std::min(len, child - offset_);
            }
            return len;
        }
        return -1;
    }

    double eval(std::int64_t n) const {
        if (n < 1) throw Error(ErrorCode::index_out_of_range, "index " + std::to_string(n) + " < 1");
        const double v = eval_raw(n + offset_);
        // combos can overshoot the summed bound by an ulp
        if (kind() == Kind::affine_combo) return std::clamp(v, -bound_, bound_);
        return v;
    }

    SequenceSpec shifted(std::int64_t k) const {
        if (k < 0) throw Error(ErrorCode::invalid_argument, "negative shift");
        SequenceSpec out = *this;
        out.offset_ += k;
        return out;
    }

private:
    void validate() const {
        std::visit(
            [](const auto& g) {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, gen::Periodic>) {
                    if (g.pattern.empty()) throw Error(ErrorCode::invalid_spec, "periodic pattern is empty");
                    check_finite(g.pattern);
                } else if constexpr (std::is_same_v<G, gen::OnesThenZeros>) {
                    if (g.n0 < 1) throw Error(ErrorCode::invalid_spec, "n0 must be positive");
                } else if constexpr (std::is_same_v<G, gen::Rotation>) {
                    if (!(g.alpha > 0.0 && g.alpha < 1.0))
                        throw Error(ErrorCode::invalid_spec, "rotation alpha must lie in (0,1)");
                } else if constexpr (std::is_same_v<G, gen::DoublingBlocks>) {
                    if (g.growth < 2) throw Error(ErrorCode::invalid_spec, "block growth must be >= 2");
                    if (g.values.empty()) throw Error(ErrorCode::invalid_spec, "block values are empty");
                    check_finite(g.values);
                } else if constexpr (std::is_same_v<G, gen::Table>) {
                    if (g.values.empty()) throw Error(ErrorCode::invalid_spec, "table is empty");
                    check_finite(g.values);
                } else if constexpr (std::is_same_v<G, gen::AffineCombo>) {
                    if (g.terms.empty()) throw Error(ErrorCode::invalid_spec, "affine-combo has no terms");
                    for (const auto& t : g.terms) {
                        if (!t.child) throw Error(ErrorCode::invalid_spec, "affine-combo term without child");
                        if (!std::isfinite(t.coefficient))
                            throw Error(ErrorCode::invalid_spec, "non-finite coefficient");
                    }
                }
            },
            gen_);
    }

    static void check_finite(const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) throw Error(ErrorCode::invalid_spec, "non-finite value");
    }

    static double max_abs(const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    double certified_bound() const {
        return std::visit(
            [](const auto& g) -> double {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, gen::Periodic>) return max_abs(g.pattern);
                else if constexpr (std::is_same_v<G, gen::DoublingBlocks>) return max_abs(g.values);
                else if constexpr (std::is_same_v<G, gen::Table>) return max_abs(g.values);
                else if constexpr (std::is_same_v<G, gen::AffineCombo>) {
                    double m = 0.0;
                    for (const auto& t : g.terms) m += std::abs(t.coefficient) * t.child->bound();
                    return m;
                } else return 1.0;
            },
            gen_);
    }

    double eval_raw(std::int64_t n) const {
        return std::visit(
            [n](const auto& g) -> double {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, gen::Periodic>) {
                    const auto p = static_cast<std::int64_t>(g.pattern.size());
                    return g.pattern[static_cast<std::size_t>((n - 1) % p)];
                } else if constexpr (std::is_same_v<G, gen::OnesThenZeros>) {
                    return n <= g.n0 ? 1.0 : 0.0;
                } else if constexpr (std::is_same_v<G, gen::Rotation>) {
                    const double v = static_cast<double>(n) * g.alpha;
                    return v - std::floor(v);
                } else if constexpr (std::is_same_v<G, gen::DoublingBlocks>) {
                    // block t covers [start_t, start_t + growth^t)
                    std::int64_t t = 0, start = 1, len = 1;
                    while (n >= start + len) {
                        start += len;
                        len *= g.growth;
                        ++t;
                    }
                    return g.values[static_cast<std::size_t>(t % static_cast<std::int64_t>(g.values.size()))];
                } else if constexpr (std::is_same_v<G, gen::DyadicHarmonic>) {
                    return 1.0 / static_cast<double>(two_adic_valuation(n) + 1);
                } else if constexpr (std::is_same_v<G, gen::Table>) {
                    if (n > static_cast<std::int64_t>(g.values.size()))
                        throw Error(ErrorCode::index_out_of_range,
                                    "index " + std::to_string(n) + " beyond table of length " +
                                        std::to_string(g.values.size()));
                    return g.values[static_cast<std::size_t>(n - 1)];
                } else {
                    double s = 0.0;
                    for (const auto& t : g.terms) s += t.coefficient * t.child->eval(n);
                    return s;
                }
            },
            gen_);
    }

    Generator gen_;
    std::int64_t offset_ = 0;
    std::string name_;
    double bound_ = 0.0;
};

inline double eval(const SequenceSpec& spec, std::int64_t n) { return spec.eval(n); }

inline SequenceSpec shift(const SequenceSpec& spec, std::int64_t k) { return spec.shifted(k); }

/// Materialized values x(1..N) with the spec's bound M.
class Prefix {
public:
    Prefix(std::vector<double> values, double bound) : values_(std::move(values)), bound_(bound) {
        if (values_.empty()) throw Error(ErrorCode::invalid_argument, "empty prefix");
        for (double v : values_)
            if (!(std::abs(v) <= bound_))
                throw Error(ErrorCode::value_out_of_bounds, "prefix value " + std::to_string(v) +
                                                                " exceeds bound " + std::to_string(bound_));
    }

    std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(values_.size()); }
    double bound() const noexcept { return bound_; }
    std::span<const double> values() const noexcept { return values_; }
    /// 1-based access.
    double operator()(std::int64_t n) const { return values_[static_cast<std::size_t>(n - 1)]; }

private:
    std::vector<double> values_;
    double bound_;
};

inline Prefix materialize(const SequenceSpec& spec, std::int64_t horizon,
                          std::int64_t max_horizon = kDefaultMaxHorizon) {
    if (horizon < 1) throw Error(ErrorCode::invalid_argument, "horizon must be >= 1");
    if (horizon > max_horizon)
        throw Error(ErrorCode::resource_limit, "horizon " + std::to_string(horizon) + " exceeds the cap " +
                                                   std::to_string(max_horizon));
    std::vector<double> values(static_cast<std::size_t>(horizon));
    for (std::int64_t n = 1; n <= horizon; ++n) values[static_cast<std::size_t>(n - 1)] = spec.eval(n);
    return Prefix(std::move(values), spec.bound());
}

inline SequenceSpec affine_combo(std::vector<std::pair<double, SequenceSpec>> terms, std::string name = {}) {
    gen::AffineCombo combo;
    for (auto& [c, s] : terms) combo.terms.push_back({c, std::make_shared<const SequenceSpec>(std::move(s))});
    return SequenceSpec(std::move(combo), 0, std::move(name));
}

/// Reserved fixture names F1..F7.
namespace fixtures {

inline constexpr double kGoldenAlpha = 0.6180339887498949; // (sqrt(5) - 1) / 2

inline SequenceSpec ones_then_zeros(std::int64_t n0 = 3) { return SequenceSpec(gen::OnesThenZeros{n0}, 0, "F1"); }
inline SequenceSpec all_ones() { return SequenceSpec(gen::Periodic{{1.0}}, 0, "F2"); }
inline SequenceSpec alternating() { return SequenceSpec(gen::Periodic{{-1.0, 1.0}}, 0, "F3"); }
inline SequenceSpec one_in_three() { return SequenceSpec(gen::Periodic{{1.0, 0.0, 0.0}}, 0, "F4"); }
inline SequenceSpec golden_rotation() { return SequenceSpec(gen::Rotation{kGoldenAlpha}, 0, "F5"); }
inline SequenceSpec doubling_blocks() { return SequenceSpec(gen::DoublingBlocks{}, 0, "F6"); }
inline SequenceSpec dyadic_harmonic() { return SequenceSpec(gen::DyadicHarmonic{}, 0, "F7"); }

inline bool is_fixture_name(std::string_view name) {
    return name.size() == 2 && name[0] == 'F' && name[1] >= '1' && name[1] <= '7';
}

/// Resolves F1..F7; `n0` only affects F1.
inline SequenceSpec by_name(std::string_view name, std::int64_t n0 = 3) {
    if (name == "F1") return ones_then_zeros(n0);
    if (name == "F2") return all_ones();
    if (name == "F3") return alternating();
    if (name == "F4") return one_in_three();
    if (name == "F5") return golden_rotation();
    if (name == "F6") return doubling_blocks();
    if (name == "F7") return dyadic_harmonic();
    throw Error(ErrorCode::invalid_spec, "unknown fixture '" + std::string(name) + "'");
}

} // namespace fixtures

} // namespace seqdist
