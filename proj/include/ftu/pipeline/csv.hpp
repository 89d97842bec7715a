#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"

namespace ftu::pipeline {

/// Comma-separated table without quoting (no field in this pipeline contains
/// a comma). The first line is the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::ptrdiff_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
        return -1;
    }

    void require(std::initializer_list<std::string_view> names, const std::string& what) const {
        std::string missing;
        for (auto n : names)
            if (column(n) < 0) missing += (missing.empty() ? "" : ", ") + std::string(n);
        if (!missing.empty()) throw SchemaError(what + ": missing column(s) " + missing);
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline CsvTable parse_csv(std::istream& in, const std::string& what) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(what + ": missing header line");
    t.header = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != t.header.size()) {
            throw FormatError(what + " line " + std::to_string(lineno) + ": " + std::to_string(fields.size()) +
                              " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_csv(in, path.string());
}

inline std::string format_csv(const CsvTable& t) {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& f) {
        for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw DataError("write failed: " + path.string());
}

/// Shortest decimal form that round-trips the double.
inline std::string format_number(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    std::string shortest = s.str();
    for (int p = 1; p <= 17; ++p) {
        std::ostringstream t;
        t.precision(p);
        t << v;
        if (std::stod(t.str()) == v) return t.str();
    }
    return shortest;
}

} // namespace ftu::pipeline
