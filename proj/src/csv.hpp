#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "esgport/error.hpp"

namespace esgport::csv {

struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Reads every data row. Blank lines and '#' comments are skipped, as is a
/// leading header whose first field does not start with a digit.
inline std::vector<Row> read(const std::string& path, std::size_t expected_fields) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open '" + path + "'");
    std::vector<Row> rows;
    std::string line;
    std::size_t n = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = split(t);
        if (first) {
            first = false;
            if (!fields[0].empty() && !(fields[0][0] >= '0' && fields[0][0] <= '9')) continue;
        }
        if (fields.size() != expected_fields)
            throw ParseError(path, n, "expected " + std::to_string(expected_fields) + " fields, got " +
                                          std::to_string(fields.size()));
        rows.push_back({n, std::move(fields)});
    }
    return rows;
}

inline double to_double(const std::string& s, const std::string& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(path, line, "not a number: '" + s + "'");
    }
}

}  // namespace esgport::csv
