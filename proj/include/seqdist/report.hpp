#pragma once

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqdist/distribution.hpp"
#include "seqdist/error.hpp"
#include "seqdist/lorentz.hpp"
#include "seqdist/rational.hpp"
#include "seqdist/weights.hpp"

namespace seqdist::report {

inline constexpr const char* kSchema = "seqdist.report/1";

using Row = nlohmann::ordered_json;

enum class Format { table, jsonl, csv };

inline Format parse_format(const std::string& s) {
    if (s == "table") return Format::table;
    if (s == "jsonl" || s == "json" || s == "json-lines") return Format::jsonl;
    if (s == "csv") return Format::csv;
    throw Error(ErrorCode::parse_error, "unknown format '" + s + "'");
}

/// Ordered rows; each row carries the schema tag and a `quantity` name first.
class Document {
public:
    Row& add(const std::string& quantity) {
        Row r;
        r["schema"] = kSchema;
        r["quantity"] = quantity;
        rows_.push_back(std::move(r));
        return rows_.back();
    }

    const std::vector<Row>& rows() const noexcept { return rows_; }

private:
    std::vector<Row> rows_;
};

/// Density as "<prefix>" decimal plus its exact "<prefix>_count" / "<prefix>_n" pair.
inline void put_density(Row& r, const std::string& prefix, const Rational& d) {
    r[prefix + "_count"] = d.num();
    r[prefix + "_n"] = d.den();
    r[prefix] = d.to_double();
}

inline void put_weight(Row& r, const WeightEstimate& w) {
    put_density(r, "w_l", w.w_l_hat);
    put_density(r, "w_u", w.w_u_hat);
    r["n_tail"] = w.n_tail;
    r["converged"] = w.converged;
}

inline void put_estimate(Row& r, const BanachEstimate& e) {
    r["method"] = to_string(e.method);
    r["point"] = e.point;
    r["lower"] = e.lower;
    r["upper"] = e.upper;
    r["error_bound"] = e.error_bound ? Row(*e.error_bound) : Row(nullptr);
    r["verdict"] = to_string(e.verdict);
}

/// One row per schedule length with exact counts and derived densities.
inline void add_window_rows(Document& doc, const std::string& label, const DensityProfile& profile) {
    for (const auto& row : profile.rows) {
        auto& r = doc.add("window");
        r["label"] = label;
        r["n"] = row.n;
        r["min_count"] = row.min_count;
        r["max_count"] = row.max_count;
        r["offsets_scanned"] = row.offsets_scanned;
        r["min_density"] = row.min_density().to_double();
        r["max_density"] = row.max_density().to_double();
    }
}

namespace detail {

inline std::string scalar_text(const Row& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline std::string csv_cell(const Row& v) {
    std::string s = scalar_text(v);
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return s;
}

} // namespace detail

inline void write_jsonl(std::ostream& os, const Document& doc) {
    for (const auto& r : doc.rows()) os << r.dump() << '\n';
}

/// Columns are the union of row keys in order of first appearance.
inline void write_csv(std::ostream& os, const Document& doc) {
    std::vector<std::string> columns;
    for (const auto& r : doc.rows())
        for (const auto& [k, v] : r.items())
            if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& r : doc.rows()) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) os << ',';
            if (r.contains(columns[c])) os << detail::csv_cell(r[columns[c]]);
        }
        os << '\n';
    }
}

/// Consecutive rows sharing a quantity print as one aligned block.
inline void write_table(std::ostream& os, const Document& doc) {
    const auto& rows = doc.rows();
    std::size_t i = 0;
    while (i < rows.size()) {
        const std::string quantity = rows[i]["quantity"].get<std::string>();
        std::size_t j = i;
        while (j < rows.size() && rows[j]["quantity"] == quantity) ++j;

        std::vector<std::string> columns;
        for (std::size_t k = i; k < j; ++k)
            for (const auto& [key, v] : rows[k].items())
                if (key != "schema" && key != "quantity" &&
                    std::find(columns.begin(), columns.end(), key) == columns.end())
                    columns.push_back(key);

        std::vector<std::vector<std::string>> cells(j - i, std::vector<std::string>(columns.size()));
        std::vector<std::size_t> width(columns.size());
        for (std::size_t c = 0; c < columns.size(); ++c) {
            width[c] = columns[c].size();
            for (std::size_t k = i; k < j; ++k) {
                if (rows[k].contains(columns[c])) cells[k - i][c] = detail::scalar_text(rows[k][columns[c]]);
                width[c] = std::max(width[c], cells[k - i][c].size());
            }
        }

        os << "== " << quantity << " ==\n";
        auto line = [&](auto&& cell) {
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const std::string s = cell(c);
                os << (c ? "  " : "") << s << std::string(width[c] - s.size(), ' ');
            }
            os << '\n';
        };
        line([&](std::size_t c) { return columns[c]; });
        for (std::size_t k = i; k < j; ++k) line([&](std::size_t c) { return cells[k - i][c]; });
        os << '\n';
        i = j;
    }
}

inline void write(std::ostream& os, const Document& doc, Format f) {
    switch (f) {
    case Format::table: write_table(os, doc); break;
    case Format::jsonl: write_jsonl(os, doc); break;
    case Format::csv: write_csv(os, doc); break;
    }
}

} // namespace seqdist::report
