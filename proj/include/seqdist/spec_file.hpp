#pragma once

// Plain-text sequence descriptions.
//
//   # comment
//   kind = periodic          one of the generator kinds
//   pattern = 1, 0, 0        lists are comma separated
//   bound = 1                optional; may only widen the certified bound
//   offset = 2               optional; drops the first two terms
//
// Per kind:
//   periodic          pattern
//   ones-then-zeros   n0
//   rotation          alpha (a real in (0,1), or the word "golden")
//   doubling-blocks   growth (default 2), values (default 0,1)
//   dyadic-harmonic   (none)
//   table             values
//   affine-combo      coefficients, children
//
// A child is a fixture name F1..F7 or a path to another spec file, resolved
// relative to the file that names it.

#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seqdist/error.hpp"
#include "seqdist/sequence.hpp"

namespace seqdist {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view text, std::string_view key) {
    const std::string s(trim(text));
    if (s.empty()) throw Error(ErrorCode::parse_error, "empty number for '" + std::string(key) + "'");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw Error(ErrorCode::parse_error, "bad number '" + s + "' for '" + std::string(key) + "'");
    return v;
}

inline std::int64_t parse_integer(std::string_view text, std::string_view key) {
    const auto s = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::parse_error, "bad integer '" + std::string(s) + "' for '" + std::string(key) + "'");
    return v;
}

inline std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::vector<double> parse_real_list(std::string_view text, std::string_view key) {
    std::vector<double> out;
    for (auto item : split_list(text)) out.push_back(parse_real(item, key));
    return out;
}

} // namespace detail

inline SequenceSpec load_spec_file(const std::filesystem::path& path, int depth = 0);

inline SequenceSpec parse_spec(std::string_view text, const std::filesystem::path& base_dir = {}, int depth = 0) {
    if (depth > 16) throw Error(ErrorCode::parse_error, "spec files nest too deeply");

    std::map<std::string, std::string, std::less<>> kv;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = std::string_view(raw);
        if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == line.npos)
            throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }

    std::map<std::string, std::string, std::less<>> unused = kv;
    auto take = [&](std::string_view key) -> std::optional<std::string> {
        auto it = unused.find(key);
        if (it == unused.end()) return std::nullopt;
        std::string v = it->second;
        unused.erase(it);
        return v;
    };
    auto require = [&](std::string_view key) {
        auto v = take(key);
        if (!v) throw Error(ErrorCode::parse_error, "missing key '" + std::string(key) + "'");
        return *v;
    };

    const std::string kind = require("kind");
    const auto bound = take("bound");
    const auto offset_text = take("offset");
    const auto name = take("name").value_or(std::string{});
    const std::int64_t offset = offset_text ? detail::parse_integer(*offset_text, "offset") : 0;

    SequenceSpec::Generator g;
    if (kind == "periodic") {
        g = gen::Periodic{detail::parse_real_list(require("pattern"), "pattern")};
    } else if (kind == "ones-then-zeros") {
        g = gen::OnesThenZeros{detail::parse_integer(require("n0"), "n0")};
    } else if (kind == "rotation") {
        const auto a = require("alpha");
        g = gen::Rotation{a == "golden" ? fixtures::kGoldenAlpha : detail::parse_real(a, "alpha")};
    } else if (kind == "doubling-blocks") {
        gen::DoublingBlocks b;
        if (auto v = take("growth")) b.growth = detail::parse_integer(*v, "growth");
        if (auto v = take("values")) b.values = detail::parse_real_list(*v, "values");
        g = b;
    } else if (kind == "dyadic-harmonic") {
        g = gen::DyadicHarmonic{};
    } else if (kind == "table") {
        g = gen::Table{detail::parse_real_list(require("values"), "values")};
    } else if (kind == "affine-combo") {
        const auto coefs = detail::parse_real_list(require("coefficients"), "coefficients");
        const std::string children_text = require("children");
        const auto children = detail::split_list(children_text);
        if (coefs.size() != children.size())
            throw Error(ErrorCode::parse_error, "coefficients and children differ in length");
        gen::AffineCombo combo;
        for (std::size_t i = 0; i < coefs.size(); ++i) {
            const std::string child(children[i]);
            auto spec = fixtures::is_fixture_name(child) ? fixtures::by_name(child)
                                                         : load_spec_file(base_dir / child, depth + 1);
            combo.terms.push_back({coefs[i], std::make_shared<const SequenceSpec>(std::move(spec))});
        }
        g = std::move(combo);
    } else {
        throw Error(ErrorCode::parse_error, "unknown kind '" + kind + "'");
    }

    if (!unused.empty())
        throw Error(ErrorCode::parse_error, "unknown key '" + unused.begin()->first + "' for kind " + kind);

    if (bound) return SequenceSpec(std::move(g), detail::parse_real(*bound, "bound"), offset, name);
    return SequenceSpec(std::move(g), offset, name);
}

inline SequenceSpec load_spec_file(const std::filesystem::path& path, int depth) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::parse_error, "cannot open spec file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str(), path.parent_path(), depth);
}

} // namespace seqdist
