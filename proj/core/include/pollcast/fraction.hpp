#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pollcast {

// Exact non-negative decimal fraction, e.g. an electoral threshold of 0.0325.
class Fraction {
public:
    constexpr Fraction() = default;
    // Reduced on construction; den must be positive.
    Fraction(std::int64_t num, std::int64_t den);

    // Accepts plain decimals ("0.0325", "3.25e-2", "1/40").
    static Fraction parse(std::string_view text);
    // Uses the shortest round-trip decimal form of x.
    static Fraction from_double(double x);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string to_string() const;

    friend bool operator==(const Fraction&, const Fraction&) = default;
    friend bool operator<(const Fraction& a, const Fraction& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace pollcast
