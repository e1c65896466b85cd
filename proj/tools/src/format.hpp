#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace sgmidas::cli {

/// Full-precision, locale-independent decimal text. NaN renders empty so
/// missing values show up as empty CSV fields.
inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_int(long long v) { return std::to_string(v); }

}  // namespace sgmidas::cli
