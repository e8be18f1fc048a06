#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "royalty/money.hpp"

namespace royalty {

inline constexpr double kDefaultDiscountRate = 0.10;
inline constexpr int kDefaultMaxDuration = 10;

/// Annual revenue of one asset; index k (1-based) is the asset's k-th year of
/// life. All amounts are strictly positive.
class AnnualSeries {
public:
    AnnualSeries(std::string asset_id, std::vector<Cents> amounts);

    [[nodiscard]] const std::string& asset_id() const { return asset_id_; }
    [[nodiscard]] std::span<const Cents> amounts() const { return amounts_; }
    [[nodiscard]] int years() const { return static_cast<int>(amounts_.size()); }
    [[nodiscard]] bool has_age(int age) const { return age >= 1 && age <= years(); }
    /// Revenue during life-year `age`, as a real. Throws std::out_of_range.
    [[nodiscard]] double at_age(int age) const;
    /// Most recent full year (the LTM).
    [[nodiscard]] Cents last() const { return amounts_.back(); }

    friend bool operator==(const AnnualSeries&, const AnnualSeries&) = default;

private:
    std::string asset_id_;
    std::vector<Cents> amounts_;
};

/// Accepted catalog item.
struct Asset {
    Asset(double dollar_age, AnnualSeries series);

    [[nodiscard]] const std::string& asset_id() const { return series.asset_id(); }

    double dollar_age;
    AnnualSeries series;

    friend bool operator==(const Asset&, const Asset&) = default;
};

/// Percentile revenue shares for one base age.
///
/// Horizons are appended in order 1, 2, ... with their cohort size; a horizon
/// either carries a share for every level or none (cohort below the minimum
/// size). Construction enforces the ordering invariants: shares are finite and
/// non-negative, non-decreasing across levels, and cohort sizes never grow
/// with the horizon.
class ShareSurface {
public:
    ShareSurface(int base_age, std::vector<double> levels);

    void add_horizon(std::size_t cohort_size, std::optional<std::vector<double>> shares);

    [[nodiscard]] int base_age() const { return base_age_; }
    [[nodiscard]] std::span<const double> levels() const { return levels_; }
    [[nodiscard]] int max_horizon() const { return static_cast<int>(rows_.size()); }
    [[nodiscard]] std::size_t cohort_size(int horizon) const;
    [[nodiscard]] bool has_cells(int horizon) const;
    /// Largest h such that horizons 1..h all carry cells (0 if horizon 1 does not).
    [[nodiscard]] int contiguous_horizons() const;
    [[nodiscard]] bool empty() const;
    [[nodiscard]] std::optional<std::size_t> level_index(double level) const;
    [[nodiscard]] std::optional<double> share(int horizon, double level) const;

    friend bool operator==(const ShareSurface&, const ShareSurface&) = default;

private:
    struct Row {
        std::size_t cohort_size = 0;
        std::optional<std::vector<double>> shares;
        friend bool operator==(const Row&, const Row&) = default;
    };

    int base_age_;
    std::vector<double> levels_;
    std::vector<Row> rows_;
};

/// Multipliers M(d, p) for durations 1..max_duration at one discount rate.
class MultiplierTable {
public:
    MultiplierTable(int base_age, double rate, std::vector<double> levels, int max_duration,
                    std::vector<double> entries);

    [[nodiscard]] int base_age() const { return base_age_; }
    [[nodiscard]] double rate() const { return rate_; }
    [[nodiscard]] std::span<const double> levels() const { return levels_; }
    [[nodiscard]] int max_duration() const { return max_duration_; }
    /// Throws std::out_of_range for an unknown duration or level.
    [[nodiscard]] double entry(int duration, double level) const;

private:
    int base_age_;
    double rate_;
    std::vector<double> levels_;
    int max_duration_;
    std::vector<double> entries_;  // row-major: (duration - 1) * levels + level index
};

/// A multiplier table was requested beyond the horizons a surface provides.
class MissingCellError : public std::runtime_error {
public:
    MissingCellError(int base_age, int horizon, double level);

    [[nodiscard]] int horizon() const { return horizon_; }
    [[nodiscard]] double level() const { return level_; }

private:
    int horizon_;
    double level_;
};

/// 1/(1+rate)^year. Throws std::domain_error for rate < 0 or year < 1.
double discount_factor(double rate, int year);

/// Sum over i = 1..d of shares[i-1] / (1+rate)^i, accumulated in ascending i
/// in extended precision.
double multiplier_from_shares(std::span<const double> shares, double rate);

/// Price implied by a multiplier of the last twelve months' revenue.
double price(double multiplier, double ltm);

MultiplierTable multiplier_table(const ShareSurface& surface, double rate, int max_duration = kDefaultMaxDuration);

}  // namespace royalty
