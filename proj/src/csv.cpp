#include "sharpld/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sharpld {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

template <class Range>
void write_fields(std::ostream& out, const Range& fields) {
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out << ',';
        out << f;
        first = false;
    }
    out << '\n';
}

} // namespace

void write_row(std::ostream& out, std::initializer_list<std::string> fields) { write_fields(out, fields); }

void write_row(std::ostream& out, const std::vector<std::string>& fields) { write_fields(out, fields); }

} // namespace sharpld
