#pragma once

#include <cstdio>
#include <string>

namespace hsbnet {

/// Floats in emitted CSVs carry 9 significant digits.
inline std::string fmt9(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

}  // namespace hsbnet
