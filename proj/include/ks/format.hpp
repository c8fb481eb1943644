#pragma once

#include <charconv>
#include <string>

namespace ks {

/// Shortest round-trip decimal form of a double (byte-deterministic output).
inline std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace ks
