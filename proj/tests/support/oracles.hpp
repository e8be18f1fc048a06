#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's arithmetic; each oracle takes the most direct route to its value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace royalty::oracle {

/// (1 + rate)^year by repeated multiplication in double.
inline double compound(double rate, int year) {
    double g = 1.0;
    for (int k = 0; k < year; ++k) g *= (1.0 + rate);
    return g;
}

/// Level annuity of unit payments: (1 - (1+r)^-d) / r, or d at r = 0.
inline double annuity(double rate, int years) {
    if (rate == 0.0) return years;
    return (1.0 - std::pow(1.0 + rate, -years)) / rate;
}

/// Term-by-term sum of ((1+g)/(1+r))^i, i = 1..d.
inline double geometric_terms(double growth, double rate, int years) {
    double total = 0.0;
    for (int i = 1; i <= years; ++i) total += std::pow(1.0 + growth, i) / std::pow(1.0 + rate, i);
    return total;
}

/// Closest-ranks linear interpolation written straight from the definition:
/// copy, insertion sort, evaluate at h = (n-1) p / 100.
inline double percentile(std::vector<double> values, double level) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        for (std::size_t j = i; j > 0 && values[j - 1] > values[j]; --j) std::swap(values[j - 1], values[j]);
    }
    const double h = (static_cast<double>(values.size()) - 1.0) * level / 100.0;
    const double lower = std::floor(h);
    const auto k = static_cast<std::size_t>(lower);
    if (k + 1 >= values.size()) return values[k];
    return values[k] + (h - lower) * (values[k + 1] - values[k]);
}

inline bool close_rel(double actual, double expected, double rel) {
    const double scale = std::max(std::fabs(expected), 1e-300);
    return std::fabs(actual - expected) <= rel * scale || actual == expected;
}

/// Small deterministic generator for randomized tests (xorshift64*).
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}
    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::uint64_t state_;
};

}  // namespace royalty::oracle
