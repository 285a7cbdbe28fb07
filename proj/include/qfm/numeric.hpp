#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <string>

namespace qfm {

using cx = std::complex<double>;
using u128 = unsigned __int128;

// Shortest round-trip decimal form, used for all CSV/JSON numeric output.
inline std::string format_double(double v) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

inline std::string format_u128(u128 v) {
    if (v == 0) return "0";
    char buf[48];
    int i = 48;
    while (v > 0) {
        buf[--i] = char('0' + int(v % 10));
        v /= 10;
    }
    return std::string(buf + i, 48 - i);
}

inline double u128_to_double(u128 v) {
    return double(static_cast<long double>(v));
}

inline u128 pow_u128(u128 base, unsigned exp) {
    u128 r = 1;
    for (unsigned i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace qfm
