#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace royalty {

/// Exact currency amount in hundredths (two fractional digits).
///
/// Raw cashflows are summed in this representation so that annual buckets
/// conserve the input decimals exactly. Conversion to binary floating point
/// happens only when shares and multipliers are computed.
class Cents {
public:
    constexpr Cents() = default;
    constexpr explicit Cents(std::int64_t hundredths) : value_(hundredths) {}

    /// Parses `123`, `123.4`, `123.45`, `-5`. More than two fractional digits,
    /// exponents, or stray characters throw std::invalid_argument.
    static Cents parse(std::string_view text);

    /// Rounds half away from zero to the nearest cent.
    static Cents from_double(double amount);

    [[nodiscard]] constexpr std::int64_t hundredths() const { return value_; }
    [[nodiscard]] double to_double() const { return static_cast<double>(value_) / 100.0; }
    [[nodiscard]] std::string to_string() const;

    Cents& operator+=(Cents other);
    Cents& operator-=(Cents other);
    friend Cents operator+(Cents a, Cents b) { return a += b; }
    friend Cents operator-(Cents a, Cents b) { return a -= b; }

    friend constexpr bool operator==(Cents, Cents) = default;
    friend constexpr auto operator<=>(Cents, Cents) = default;

private:
    std::int64_t value_ = 0;
};

}  // namespace royalty
