#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gscat/types.hpp"

namespace gscat {

using Value = std::variant<std::int64_t, double, std::string>;

/// Columnar report emitted both as RFC-4180 CSV and as a JSON array of objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
};

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string value_to_string(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    return std::get<std::string>(v);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline void write_csv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("table: cannot write " + path);
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out << ",";
        out << detail::csv_escape(t.columns[i]);
    }
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << detail::csv_escape(detail::value_to_string(row[i]));
        }
        out << "\n";
    }
    if (!out) throw IoError("table: write failed: " + path);
}

inline void write_json(const Table& t, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            const Value& v = row[i];
            if (std::holds_alternative<std::int64_t>(v)) {
                obj[t.columns[i]] = std::get<std::int64_t>(v);
            } else if (std::holds_alternative<double>(v)) {
                double d = std::get<double>(v);
                // JSON has no infinity; keep the sentinel readable.
                if (std::isfinite(d))
                    obj[t.columns[i]] = d;
                else
                    obj[t.columns[i]] = detail::format_double(d);
            } else {
                obj[t.columns[i]] = std::get<std::string>(v);
            }
        }
        arr.push_back(obj);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("table: cannot write " + path);
    out << arr.dump(2) << "\n";
    if (!out) throw IoError("table: write failed: " + path);
}

inline void write_table(const Table& t, const std::string& csv_path, const std::string& json_path) {
    write_csv(t, csv_path);
    write_json(t, json_path);
}

}  // namespace gscat
