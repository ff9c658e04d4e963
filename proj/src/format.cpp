#include "simplex/format.hpp"

#include <charconv>
#include <system_error>

#include "simplex/errors.hpp"

namespace simplex {

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("not a number: '" + std::string(text) + "'");
    return value;
}

int64_t parse_int(std::string_view text) {
    int64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("not an integer: '" + std::string(text) + "'");
    return value;
}

uint64_t parse_uint(std::string_view text) {
    uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("not an unsigned integer: '" + std::string(text) + "'");
    return value;
}

uint64_t parse_hex(std::string_view text) {
    uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value, 16);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw DataError("not a hex value: '" + std::string(text) + "'");
    return value;
}

std::string format_hex(uint64_t value) {
    char buf[17];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, 16);
    std::string s(buf, res.ptr);
    return std::string(16 - s.size(), '0') + s;
}

}  // namespace simplex
