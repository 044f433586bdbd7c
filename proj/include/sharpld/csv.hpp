#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace sharpld {

/// 17 significant digits ("%.17g"); "inf", "-inf" and "nan" for non-finite values.
std::string fmt(double v);

/// Comma-joined fields terminated by '\n'.
void write_row(std::ostream& out, std::initializer_list<std::string> fields);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

} // namespace sharpld
