#pragma once

#include <array>
#include <charconv>
#include <string>

namespace spoilseg::detail {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline std::string format_fixed6(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 6);
    return std::string(buf.data(), res.ptr);
}

} // namespace spoilseg::detail
