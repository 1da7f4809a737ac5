#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace liouville {

/// Locale-independent, 9-significant-digit serialization used by every CSV
/// and JSON report. Integral values keep a trailing ".0" so columns stay
/// recognizably floating point.
inline std::string format_g9(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

}  // namespace liouville
