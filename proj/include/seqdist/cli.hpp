#pragma once

// Command-line front end. Kept header-only so tests can drive run() in-process.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "seqdist/distribution.hpp"
#include "seqdist/error.hpp"
#include "seqdist/lorentz.hpp"
#include "seqdist/report.hpp"
#include "seqdist/sequence.hpp"
#include "seqdist/spec_file.hpp"
#include "seqdist/weights.hpp"
#include "seqdist/window.hpp"

namespace seqdist::cli {

inline constexpr const char* kMaxHorizonEnv = "SEQDIST_MAX_HORIZON";

enum ExitCode : int { ok = 0, failure = 1, usage = 2, resource = 3 };

struct RunConfig {
    std::string fixture;
    std::int64_t n0 = 3;
    std::string spec_file;
    std::int64_t horizon = 65536;
    std::string schedule = "16,2"; ///< geometric base,ratio
    std::int64_t schedule_limit = 0; ///< 0 means horizon / 4
    Tolerances tol;
    std::string format = "table";
    std::string out;
};

inline std::int64_t max_horizon_from_env() {
    const char* v = std::getenv(kMaxHorizonEnv);
    if (!v || !*v) return kDefaultMaxHorizon;
    const auto cap = detail::parse_integer(v, kMaxHorizonEnv);
    if (cap < 1) throw Error(ErrorCode::parse_error, std::string(kMaxHorizonEnv) + " must be positive");
    return cap;
}

inline SequenceSpec resolve_spec(const RunConfig& c) {
    if (!c.fixture.empty() && !c.spec_file.empty())
        throw Error(ErrorCode::parse_error, "--fixture and --spec-file are mutually exclusive");
    if (!c.spec_file.empty()) return load_spec_file(c.spec_file);
    return fixtures::by_name(c.fixture.empty() ? "F1" : c.fixture, c.n0);
}

inline WindowSchedule resolve_schedule(const RunConfig& c) {
    const auto parts = detail::parse_real_list(c.schedule, "schedule");
    if (parts.size() != 2) throw Error(ErrorCode::parse_error, "--schedule expects BASE,RATIO");
    const std::int64_t limit = c.schedule_limit > 0 ? c.schedule_limit : c.horizon / 4;
    auto s = WindowSchedule::geometric(parts[0], parts[1], std::min(limit, c.horizon));
    s.check_fits(c.horizon);
    return s;
}

inline void validate(const RunConfig& c) {
    if (c.horizon < 1) throw Error(ErrorCode::parse_error, "--horizon must be >= 1");
    if (!(c.tol.gap > 0.0) || !(c.tol.trend > 0.0)) throw Error(ErrorCode::parse_error, "tolerances must be positive");
}

inline std::string source_name(const RunConfig& c) {
    if (!c.spec_file.empty()) return c.spec_file;
    const std::string f = c.fixture.empty() ? "F1" : c.fixture;
    return f == "F1" ? f + "(n0=" + std::to_string(c.n0) + ")" : f;
}

inline void add_run_row(report::Document& doc, const std::string& command, const RunConfig& c,
                        const SequenceSpec& spec, const WindowSchedule& s) {
    auto& r = doc.add("run");
    r["command"] = command;
    r["source"] = source_name(c);
    r["kind"] = to_string(spec.kind());
    r["horizon"] = c.horizon;
    r["bound"] = spec.bound();
    r["schedule"] = std::vector<std::int64_t>(s.lengths().begin(), s.lengths().end());
    r["tolerance_gap"] = c.tol.gap;
    r["tolerance_trend"] = c.tol.trend;
}

inline report::Document analyze(const RunConfig& c, const std::vector<double>& meshes,
                                std::optional<double> epsilon) {
    validate(c);
    const auto spec = resolve_spec(c);
    const auto s = resolve_schedule(c);
    const auto p = materialize(spec, c.horizon, max_horizon_from_env());

    CrossValidationOptions opt;
    opt.meshes = meshes;
    if (epsilon) {
        if (p.bound() == 0.0) throw Error(ErrorCode::degenerate_epsilon, "the sequence is identically zero");
        opt.sublimit_epsilon_fraction = *epsilon / (2.0 * p.bound());
    }
    const auto cv = cross_validate(p, s, c.tol, opt);

    report::Document doc;
    add_run_row(doc, "analyze", c, spec, s);

    for (const auto& row : cv.lorentz.profile.rows) {
        auto& r = doc.add("cesaro");
        r["n"] = row.n;
        r["min_mean"] = row.min_mean;
        r["max_mean"] = row.max_mean;
        r["gap"] = row.gap();
    }
    {
        auto& r = doc.add("lorentz");
        r["estimate"] = cv.lorentz.estimate;
        r["uniform_gap"] = cv.lorentz.uniform_gap;
        r["n_tail"] = cv.lorentz.n_tail;
        r["error_bound"] = cv.lorentz.error_bound();
        r["verdict"] = to_string(cv.lorentz.verdict);
    }

    if (cv.sublimits) {
        for (const auto& cl : cv.sublimits->clusters) {
            auto& r = doc.add("sublimit");
            r["center"] = cl.center;
            r["radius"] = cl.radius;
            r["occurrences"] = cl.occurrences;
            r["isolated"] = cl.isolated;
            report::put_weight(r, cl.weight);
        }
        auto& r = doc.add("sublimit_residual");
        r["epsilon"] = cv.sublimits->epsilon;
        r["clusters"] = cv.sublimits->clusters.size();
        report::put_density(r, "residual_mass", cv.sublimits->residual_mass());
    }

    for (std::size_t j = 0; j < cv.simple.values.size(); ++j) {
        auto& r = doc.add("value_weight");
        r["value"] = cv.simple.values[j];
        report::put_weight(r, cv.simple.weights[j]);
    }
    {
        auto& r = doc.add("simple");
        r["distinct_values"] = cv.simple.distinct_count;
        r["capped"] = cv.simple.capped;
        r["weight_sum"] = cv.simple.weight_sum();
        r["simply_distributed"] = cv.simple.simply_distributed;
    }

    if (cv.simple_estimate) report::put_estimate(doc.add("estimate"), *cv.simple_estimate);
    if (cv.sublimit_estimate) report::put_estimate(doc.add("estimate"), *cv.sublimit_estimate);
    report::put_estimate(doc.add("estimate"), cv.quantization);

    for (const auto& st : cv.quantization.steps) {
        auto& r = doc.add("mesh_step");
        r["mesh"] = st.mesh;
        r["cells"] = st.cells;
        r["occupied_cells"] = st.occupied_cells;
        r["point"] = st.point;
        r["lower"] = st.lower;
        r["upper"] = st.upper;
        r["simply_distributed"] = st.simply_distributed;
    }

    {
        auto& r = doc.add("cross_validation");
        r["lorentz_estimate"] = cv.lorentz.estimate;
        r["lorentz_verdict"] = to_string(cv.lorentz.verdict);
        r["weight_path_method"] = to_string(cv.weight_path().method);
        r["weight_path_point"] = cv.weight_path().point;
        r["weight_path_verdict"] = to_string(cv.weight_path().verdict);
        r["difference"] = cv.difference;
        r["consistent"] = cv.consistent;
    }
    return doc;
}

inline std::string interval_label(double lo, double hi) {
    std::ostringstream ss;
    ss.precision(15);
    ss << '[' << lo << ',' << hi << ')';
    return ss.str();
}

inline report::Document weights(const RunConfig& c, const std::vector<std::string>& intervals,
                                const std::vector<double>& values, double epsilon) {
    validate(c);
    if (intervals.empty() && values.empty())
        throw Error(ErrorCode::parse_error, "weights needs at least one --interval or --value");
    const auto spec = resolve_spec(c);
    const auto s = resolve_schedule(c);
    const auto p = materialize(spec, c.horizon, max_horizon_from_env());

    report::Document doc;
    add_run_row(doc, "weights", c, spec, s);

    struct Item {
        std::string label;
        WeightEstimate w;
    };
    std::vector<Item> items;
    for (const auto& text : intervals) {
        const auto ends = detail::parse_real_list(text, "interval");
        if (ends.size() != 2) throw Error(ErrorCode::parse_error, "--interval expects LO,HI");
        const auto S = IntervalSet::clipped({{ends[0], ends[1]}}, p.bound());
        items.push_back({interval_label(ends[0], ends[1]), set_weight(p, S, s, c.tol)});
    }
    for (double a : values) {
        if (!(epsilon > 0.0)) throw Error(ErrorCode::parse_error, "--epsilon must be positive");
        items.push_back({interval_label(a - epsilon, a + epsilon), sublimit_weight(p, a, epsilon, s, c.tol)});
    }

    for (const auto& it : items) {
        auto& r = doc.add("weight");
        r["label"] = it.label;
        report::put_weight(r, it.w);
        r["gap"] = it.w.gap().to_double();
        r["point"] = it.w.point();
    }
    for (const auto& it : items) report::add_window_rows(doc, it.label, it.w.per_window);
    return doc;
}

/// Limit read off exact counts: bounded max counts force density 0, full
/// windows at every length force density 1.
inline std::optional<int> count_limit(const DensityProfile& profile) {
    const auto& rows = profile.rows;
    const bool full = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.min_count == r.n; });
    if (full) return 1;
    if (rows.size() >= 2 && rows.back().max_count == rows[rows.size() - 2].max_count &&
        rows.back().min_count == 0 && rows.back().max_count < rows.back().n)
        return 0;
    return std::nullopt;
}

inline report::Document demo_nonmeasure(const RunConfig& c, const std::vector<std::int64_t>& n0s, double epsilon) {
    validate(c);
    const auto s = resolve_schedule(c);
    const auto cap = max_horizon_from_env();

    report::Document doc;
    {
        auto& r = doc.add("run");
        r["command"] = "demo-nonmeasure";
        r["horizon"] = c.horizon;
        r["schedule"] = std::vector<std::int64_t>(s.lengths().begin(), s.lengths().end());
        r["epsilon"] = epsilon;
    }

    auto add = [&](const std::string& name, std::int64_t n0, const SequenceSpec& spec) {
        const auto p = materialize(spec, c.horizon, cap);
        const auto S = IntervalSet::clipped({{1.0 - epsilon, 1.0 + epsilon}}, p.bound());
        const auto w = set_weight(p, S, s, c.tol);
        auto& r = doc.add("nonmeasure");
        r["sequence"] = name;
        r["n0"] = n0 > 0 ? report::Row(n0) : report::Row(nullptr);
        r["index_set"] = n0 > 0 ? "{1.." + std::to_string(n0) + "}" : std::string("N");
        report::put_weight(r, w);
        const auto lim = count_limit(w.per_window);
        r["limit"] = lim ? report::Row(*lim) : report::Row(nullptr);
        return w;
    };

    for (auto n0 : n0s) {
        if (n0 < 1) throw Error(ErrorCode::parse_error, "n0 must be positive");
        add("F1", n0, fixtures::ones_then_zeros(n0));
    }
    add("F2", 0, fixtures::all_ones());

    for (auto n0 : n0s) {
        const auto w = set_weight(materialize(fixtures::ones_then_zeros(n0), c.horizon, cap),
                                  IntervalSet::clipped({{1.0 - epsilon, 1.0 + epsilon}}, 1.0), s, c.tol);
        report::add_window_rows(doc, "F1(n0=" + std::to_string(n0) + ")", w.per_window);
    }

    auto& note = doc.add("note");
    note["text"] =
        "Each finite index set {1..n0} has window counts bounded by n0, so its weight is 0; the whole index "
        "set carries weight 1. A countably additive mu with mu({n : x(n) in S}) = w(x,S) would give "
        "mu(N) = sum of mu over finite pieces = 0, contradicting mu(N) = 1. Interval weights are finitely "
        "but not countably additive.";
    return doc;
}

inline int emit(const report::Document& doc, const RunConfig& c, std::ostream& out) {
    const auto fmt = report::parse_format(c.format);
    if (c.out.empty()) {
        report::write(out, doc, fmt);
        return ok;
    }
    std::ofstream f(c.out);
    if (!f) throw Error(ErrorCode::parse_error, "cannot open output file " + c.out);
    report::write(f, doc, fmt);
    return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Finite-horizon distribution and almost-convergence analysis of bounded sequences", "seqdist"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::optional<std::int64_t> horizon;
    auto common = [&cfg, &horizon](CLI::App* sub) {
        sub->add_option("--fixture", cfg.fixture, "Fixture name F1..F7");
        sub->add_option("--n0", cfg.n0, "Length of the ones block for F1")->capture_default_str();
        sub->add_option("--spec-file", cfg.spec_file, "Sequence spec file (key = value lines)");
        sub->add_option("--horizon", horizon, "Number of terms to materialize (analyze/weights 65536, demo 10000)");
        sub->add_option("--schedule", cfg.schedule, "Geometric window schedule BASE,RATIO")->capture_default_str();
        sub->add_option("--schedule-limit", cfg.schedule_limit, "Largest window length (default horizon/4)");
        sub->add_option("--tolerance-gap", cfg.tol.gap, "Weight gap tolerance")->capture_default_str();
        sub->add_option("--tolerance-trend", cfg.tol.trend, "Row-to-row trend tolerance")->capture_default_str();
        sub->add_option("--format", cfg.format, "table | jsonl | csv")->capture_default_str();
        sub->add_option("--out", cfg.out, "Write the report here instead of stdout");
    };

    auto* analyze_cmd = app.add_subcommand("analyze", "Lorentz verdict cross-checked against weight-based estimates");
    std::vector<double> meshes{1.0 / 16.0, 1.0 / 64.0};
    std::optional<double> analyze_eps;
    analyze_cmd->add_option("--meshes", meshes, "Strictly decreasing quantization meshes")->delimiter(',');
    analyze_cmd->add_option("--epsilon", analyze_eps, "Sub-limit clustering radius (default 0.01 * M)");

    auto* weights_cmd = app.add_subcommand("weights", "Weights of intervals or of values +- epsilon");
    std::vector<std::string> intervals;
    std::vector<double> values;
    double weights_eps = 0.1;
    weights_cmd->add_option("--interval", intervals, "Half-open interval LO,HI (repeatable)");
    weights_cmd->add_option("--value", values, "Value a; weighs [a-eps, a+eps) (repeatable)");
    weights_cmd->add_option("--epsilon", weights_eps, "Half-width for --value")->capture_default_str();

    auto* demo_cmd = app.add_subcommand("demo-nonmeasure", "Finite sets of weight 0 against a whole space of weight 1");
    std::vector<std::int64_t> n0s{1, 10, 100};
    double demo_eps = 0.1;
    demo_cmd->add_option("--n0-list", n0s, "Ones-block lengths for F1")->delimiter(',');
    demo_cmd->add_option("--epsilon", demo_eps, "Half-width of the interval around 1")->capture_default_str();

    common(analyze_cmd);
    common(weights_cmd);
    common(demo_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (demo_cmd->parsed()) {
            cfg.horizon = horizon.value_or(10000);
            return emit(demo_nonmeasure(cfg, n0s, demo_eps), cfg, out);
        }
        cfg.horizon = horizon.value_or(65536);
        if (analyze_cmd->parsed()) return emit(analyze(cfg, meshes, analyze_eps), cfg, out);
        return emit(weights(cfg, intervals, values, weights_eps), cfg, out);
    } catch (const Error& e) {
        err << "seqdist: " << e.what() << '\n';
        return e.code() == ErrorCode::resource_limit ? resource : usage;
    } catch (const std::exception& e) {
        err << "seqdist: " << e.what() << '\n';
        return failure;
    }
}

} // namespace seqdist::cli
