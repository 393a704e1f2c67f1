#include "ocff/text.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "ocff/errors.hpp"

namespace ocff {

std::string full_precision(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double_strict(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty())
        throw DataError(what + ": empty number field");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw DataError(what + ": cannot parse number '" + t + "'");
    return v;
}

long long parse_int_strict(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty())
        throw DataError(what + ": empty integer field");
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size())
        throw DataError(what + ": cannot parse integer '" + t + "'");
    return v;
}

} // namespace ocff
