#include "pollcast/fraction.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "pollcast/error.hpp"

namespace pollcast {

namespace {

constexpr std::int64_t kMaxDen = 1'000'000'000'000'000'000LL;  // 1e18

[[noreturn]] void bad(std::string_view text) {
    throw Error(ErrorCode::invalid_argument, "not a fraction: '" + std::string(text) + "'");
}

std::int64_t pow10(int e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= 10;
    return r;
}

}  // namespace

Fraction::Fraction(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw Error(ErrorCode::invalid_argument, "fraction denominator must be positive");
    if (num < 0) throw Error(ErrorCode::invalid_argument, "fraction must be non-negative");
    const auto g = std::gcd(num, den);
    num_ = g ? num / g : 0;
    den_ = g ? den / g : 1;
}

Fraction Fraction::parse(std::string_view text) {
    if (text.empty()) bad(text);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        std::int64_t n = 0, d = 0;
        auto a = std::from_chars(text.data(), text.data() + slash, n);
        auto b = std::from_chars(text.data() + slash + 1, text.data() + text.size(), d);
        if (a.ec != std::errc{} || a.ptr != text.data() + slash || b.ec != std::errc{} ||
            b.ptr != text.data() + text.size() || d <= 0 || n < 0)
            bad(text);
        return Fraction(n, d);
    }

    std::size_t i = 0;
    std::int64_t mantissa = 0;
    int scale = 0;  // digits after the decimal point
    bool any_digit = false, seen_point = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.' && !seen_point) {
            seen_point = true;
            continue;
        }
        if (c < '0' || c > '9') break;
        any_digit = true;
        if (mantissa > (std::numeric_limits<std::int64_t>::max() - 9) / 10) bad(text);
        mantissa = mantissa * 10 + (c - '0');
        if (seen_point) ++scale;
    }
    if (!any_digit) bad(text);
    int exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') bad(text);
        ++i;
        auto r = std::from_chars(text.data() + i + (i < text.size() && text[i] == '+'),
                                 text.data() + text.size(), exponent);
        if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) bad(text);
    }
    scale -= exponent;
    if (scale < 0) {
        if (-scale > 18) bad(text);
        const auto factor = pow10(-scale);
        if (mantissa > std::numeric_limits<std::int64_t>::max() / factor) bad(text);
        return Fraction(mantissa * factor, 1);
    }
    if (scale > 18 || pow10(scale) > kMaxDen) bad(text);
    return Fraction(mantissa, pow10(scale));
}

Fraction Fraction::from_double(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    if (r.ec != std::errc{}) bad("?");
    return parse(std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)));
}

std::string Fraction::to_string() const {
    // Finite decimal when the denominator is 2^a 5^b, otherwise num/den.
    auto d = den_;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
    const int digits = std::max(twos, fives);
    if (digits > 18) return std::to_string(num_) + "/" + std::to_string(den_);
    const __int128 scaled = static_cast<__int128>(num_) * (pow10(digits) / den_);
    const auto whole = static_cast<std::int64_t>(scaled / pow10(digits));
    auto frac = static_cast<std::int64_t>(scaled % pow10(digits));
    std::string out = std::to_string(whole);
    if (digits == 0) return out;
    std::string tail(static_cast<std::size_t>(digits), '0');
    for (int k = digits - 1; k >= 0; --k) {
        tail[static_cast<std::size_t>(k)] = static_cast<char>('0' + frac % 10);
        frac /= 10;
    }
    while (!tail.empty() && tail.back() == '0') tail.pop_back();
    return tail.empty() ? out : out + "." + tail;
}

}  // namespace pollcast
