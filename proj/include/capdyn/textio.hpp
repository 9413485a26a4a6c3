#pragma once
// Small text-output helpers shared by the config and report emitters.

#include <cstdio>
#include <cstdlib>
#include <string>

namespace capdyn {

// shortest decimal form that parses back to the same double ("C" locale);
// deterministic, so emitted files are byte-stable
inline std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

// RFC-4180 style quoting, applied only when the field needs it
inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace capdyn
