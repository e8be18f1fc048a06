#include "royalty/money.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace royalty {

namespace {

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

[[noreturn]] void bad_amount(std::string_view text) {
    throw std::invalid_argument("invalid decimal amount '" + std::string(text) + "'");
}

}  // namespace

Cents Cents::parse(std::string_view text) {
    std::string_view rest = text;
    bool negative = false;
    if (!rest.empty() && (rest.front() == '-' || rest.front() == '+')) {
        negative = rest.front() == '-';
        rest.remove_prefix(1);
    }
    if (rest.empty()) bad_amount(text);

    std::int64_t units = 0;
    std::size_t pos = 0;
    std::size_t int_digits = 0;
    for (; pos < rest.size() && rest[pos] != '.'; ++pos, ++int_digits) {
        const char c = rest[pos];
        if (c < '0' || c > '9') bad_amount(text);
        if (units > (kMax / 100 - 9) / 10) throw std::out_of_range("amount out of range: " + std::string(text));
        units = units * 10 + (c - '0');
    }

    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (pos < rest.size()) {
        ++pos;  // '.'
        for (; pos < rest.size(); ++pos, ++frac_digits) {
            const char c = rest[pos];
            if (c < '0' || c > '9' || frac_digits == 2) bad_amount(text);
            frac = frac * 10 + (c - '0');
        }
        if (frac_digits == 0 && int_digits == 0) bad_amount(text);
    }
    if (int_digits == 0 && frac_digits == 0) bad_amount(text);
    if (frac_digits == 1) frac *= 10;

    const std::int64_t total = units * 100 + frac;
    return Cents(negative ? -total : total);
}

Cents Cents::from_double(double amount) {
    if (!std::isfinite(amount) || std::fabs(amount) * 100.0 > 9.0e16) {
        throw std::out_of_range("amount not representable in cents");
    }
    return Cents(std::llround(amount * 100.0));
}

std::string Cents::to_string() const {
    const bool negative = value_ < 0;
    // magnitude as unsigned to survive INT64_MIN
    const auto magnitude = negative ? 0 - static_cast<std::uint64_t>(value_) : static_cast<std::uint64_t>(value_);
    std::string out = std::to_string(magnitude / 100);
    const auto frac = magnitude % 100;
    out += '.';
    out += static_cast<char>('0' + frac / 10);
    out += static_cast<char>('0' + frac % 10);
    return negative ? "-" + out : out;
}

Cents& Cents::operator+=(Cents other) {
    if (__builtin_add_overflow(value_, other.value_, &value_)) {
        throw std::overflow_error("currency sum overflow");
    }
    return *this;
}

Cents& Cents::operator-=(Cents other) {
    if (__builtin_sub_overflow(value_, other.value_, &value_)) {
        throw std::overflow_error("currency difference overflow");
    }
    return *this;
}

}  // namespace royalty
