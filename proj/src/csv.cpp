#include "basket/csv.hpp"

#include <cmath>
#include <cstdio>

namespace basket {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_escape(fields[i]);
    }
    out += '\n';
    return out;
}

std::string format_double(double v, int decimals) {
    char buf[64];
    if (decimals >= 0) {
        std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    } else if (v == static_cast<double>(static_cast<long long>(v)) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        // trim to the shortest representation that round-trips
        for (int prec = 1; prec < 17; ++prec) {
            char probe[64];
            std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
            double back;
            if (std::sscanf(probe, "%lf", &back) == 1 && back == v) {
                return std::string(probe);
            }
        }
    }
    return std::string(buf);
}

}  // namespace basket
