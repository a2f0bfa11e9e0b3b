#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace csme::detail {

/// %.9g formatting; the single format used for report numbers so the
/// human-readable and delimited outputs carry identical values.
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Shortest round-trip representation, for data files.
inline std::string fmt_exact(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error(path + ": cannot open file for writing");
    file << content;
    if (!file) throw std::runtime_error(path + ": write failed");
}

}  // namespace csme::detail
