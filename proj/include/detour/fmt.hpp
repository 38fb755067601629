#pragma once

#include <cstdio>
#include <string>

namespace detour {

// Fixed 6-decimal rendering used by every CSV/report writer.
inline std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace detour
