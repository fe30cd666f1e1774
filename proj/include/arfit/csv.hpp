#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arfit::csv {

/// Shortest round-trip decimal representation ('.' separator, full
/// precision); parsing the result recovers the exact double.
inline std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("csv: cannot parse floating-point value '" +
                                    std::string(text) + "'");
    }
    return value;
}

inline std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("csv: cannot parse integer value '" + std::string(text) + "'");
    }
    return value;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

/// Coefficient vectors are stored semicolon-joined inside one CSV field.
inline std::string join_doubles(std::span<const double> values, char sep = ';') {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out.push_back(sep);
        out += format_double(values[i]);
    }
    return out;
}

inline std::vector<double> parse_doubles(std::string_view text, char sep = ';') {
    std::vector<double> out;
    if (text.empty()) return out;
    for (std::string_view field : split(text, sep)) {
        out.push_back(parse_double(field));
    }
    return out;
}

}  // namespace arfit::csv
