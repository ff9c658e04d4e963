#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace simplex {

// Locale-independent numeric formatting shared by every on-disk format.
// 12 significant digits keeps round-trip error below 5e-13 relative.
std::string format_double(double value);

// Strict parsers; throw DataError with the offending text.
double parse_double(std::string_view text);
int64_t parse_int(std::string_view text);
uint64_t parse_uint(std::string_view text);
uint64_t parse_hex(std::string_view text);
std::string format_hex(uint64_t value);

}  // namespace simplex
