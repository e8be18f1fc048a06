#include "royalty/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace royalty {

namespace {

std::string level_text(double level) {
    std::string text = std::to_string(level);
    text.erase(text.find_last_not_of('0') + 1);
    if (text.ends_with('.')) text.pop_back();
    return text;
}

void require_rate(double rate) {
    if (!std::isfinite(rate) || rate < 0.0) {
        throw std::domain_error("discount rate must be finite and >= 0, got " + std::to_string(rate));
    }
}

// Running sum of discounted shares; entry k of the result is the multiplier
// for duration k+1. Both multiplier_from_shares and multiplier_table go
// through here so that a table entry and a direct recomputation agree exactly.
std::vector<double> discounted_prefix_sums(std::span<const double> shares, double rate) {
    require_rate(rate);
    std::vector<double> sums;
    sums.reserve(shares.size());
    const long double step = 1.0L + static_cast<long double>(rate);
    long double growth = 1.0L;
    long double acc = 0.0L;
    for (const double share : shares) {
        if (!std::isfinite(share) || share < 0.0) {
            throw std::domain_error("shares must be finite and non-negative, got " + std::to_string(share));
        }
        growth *= step;
        acc += static_cast<long double>(share) / growth;
        sums.push_back(static_cast<double>(acc));
    }
    return sums;
}

}  // namespace

AnnualSeries::AnnualSeries(std::string asset_id, std::vector<Cents> amounts)
    : asset_id_(std::move(asset_id)), amounts_(std::move(amounts)) {
    if (amounts_.empty()) throw std::domain_error("annual series for '" + asset_id_ + "' is empty");
    for (const Cents amount : amounts_) {
        if (amount <= Cents{0}) {
            throw std::domain_error("annual series for '" + asset_id_ + "' has non-positive amount " +
                                    amount.to_string());
        }
    }
}

double AnnualSeries::at_age(int age) const {
    if (!has_age(age)) throw std::out_of_range("no annual bucket at age " + std::to_string(age));
    return amounts_[static_cast<std::size_t>(age - 1)].to_double();
}

Asset::Asset(double dollar_age_, AnnualSeries series_) : dollar_age(dollar_age_), series(std::move(series_)) {
    if (!std::isfinite(dollar_age) || dollar_age <= 0.0) {
        throw std::domain_error("dollar age of '" + series.asset_id() + "' must be > 0");
    }
}

ShareSurface::ShareSurface(int base_age, std::vector<double> levels) : base_age_(base_age), levels_(std::move(levels)) {
    if (base_age_ < 1) throw std::domain_error("base age must be >= 1");
    if (levels_.empty()) throw std::domain_error("at least one percentile level is required");
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        if (!(levels_[k] > 0.0 && levels_[k] < 100.0)) {
            throw std::domain_error("percentile level " + level_text(levels_[k]) + " outside (0,100)");
        }
        if (k > 0 && !(levels_[k] > levels_[k - 1])) {
            throw std::domain_error("percentile levels must be strictly increasing");
        }
    }
}

void ShareSurface::add_horizon(std::size_t cohort_size, std::optional<std::vector<double>> shares) {
    const int horizon = max_horizon() + 1;
    if (!rows_.empty() && cohort_size > rows_.back().cohort_size) {
        throw std::domain_error("cohort size grows at horizon " + std::to_string(horizon));
    }
    if (shares) {
        if (shares->size() != levels_.size()) {
            throw std::domain_error("horizon " + std::to_string(horizon) + " needs one share per level");
        }
        for (std::size_t k = 0; k < shares->size(); ++k) {
            const double value = (*shares)[k];
            if (!std::isfinite(value) || value < 0.0) {
                throw std::domain_error("share at horizon " + std::to_string(horizon) + " must be finite and >= 0");
            }
            if (k > 0 && value < (*shares)[k - 1]) {
                throw std::domain_error("shares at horizon " + std::to_string(horizon) + " decrease with level");
            }
        }
    }
    rows_.push_back(Row{cohort_size, std::move(shares)});
}

std::size_t ShareSurface::cohort_size(int horizon) const {
    if (horizon < 1 || horizon > max_horizon()) return 0;
    return rows_[static_cast<std::size_t>(horizon - 1)].cohort_size;
}

bool ShareSurface::has_cells(int horizon) const {
    return horizon >= 1 && horizon <= max_horizon() && rows_[static_cast<std::size_t>(horizon - 1)].shares.has_value();
}

int ShareSurface::contiguous_horizons() const {
    int h = 0;
    while (has_cells(h + 1)) ++h;
    return h;
}

bool ShareSurface::empty() const {
    return std::none_of(rows_.begin(), rows_.end(), [](const Row& row) { return row.shares.has_value(); });
}

std::optional<std::size_t> ShareSurface::level_index(double level) const {
    const auto it = std::find(levels_.begin(), levels_.end(), level);
    if (it == levels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - levels_.begin());
}

std::optional<double> ShareSurface::share(int horizon, double level) const {
    const auto index = level_index(level);
    if (!index || !has_cells(horizon)) return std::nullopt;
    return (*rows_[static_cast<std::size_t>(horizon - 1)].shares)[*index];
}

MultiplierTable::MultiplierTable(int base_age, double rate, std::vector<double> levels, int max_duration,
                                 std::vector<double> entries)
    : base_age_(base_age),
      rate_(rate),
      levels_(std::move(levels)),
      max_duration_(max_duration),
      entries_(std::move(entries)) {
    if (entries_.size() != levels_.size() * static_cast<std::size_t>(std::max(max_duration_, 0))) {
        throw std::invalid_argument("multiplier table size does not match durations x levels");
    }
}

double MultiplierTable::entry(int duration, double level) const {
    const auto it = std::find(levels_.begin(), levels_.end(), level);
    if (duration < 1 || duration > max_duration_ || it == levels_.end()) {
        throw std::out_of_range("no multiplier for duration " + std::to_string(duration) + ", level " +
                                level_text(level));
    }
    const auto col = static_cast<std::size_t>(it - levels_.begin());
    return entries_[static_cast<std::size_t>(duration - 1) * levels_.size() + col];
}

MissingCellError::MissingCellError(int base_age, int horizon, double level)
    : std::runtime_error("surface for base age " + std::to_string(base_age) + " has no share at horizon " +
                         std::to_string(horizon) + ", level " + level_text(level)),
      horizon_(horizon),
      level_(level) {}

double discount_factor(double rate, int year) {
    require_rate(rate);
    if (year < 1) throw std::domain_error("discount year must be >= 1, got " + std::to_string(year));
    const long double step = 1.0L + static_cast<long double>(rate);
    long double growth = 1.0L;
    for (int k = 0; k < year; ++k) growth *= step;
    return static_cast<double>(1.0L / growth);
}

double multiplier_from_shares(std::span<const double> shares, double rate) {
    if (shares.empty()) throw std::domain_error("at least one share is required");
    return discounted_prefix_sums(shares, rate).back();
}

double price(double multiplier, double ltm) {
    if (!std::isfinite(ltm) || ltm <= 0.0) throw std::domain_error("LTM revenue must be > 0");
    if (!std::isfinite(multiplier) || multiplier < 0.0) throw std::domain_error("multiplier must be >= 0");
    return multiplier * ltm;
}

MultiplierTable multiplier_table(const ShareSurface& surface, double rate, int max_duration) {
    require_rate(rate);
    if (max_duration < 1) throw std::domain_error("max duration must be >= 1");

    const auto levels = surface.levels();
    // Fail on the first missing cell in (horizon, level) order.
    for (int i = 1; i <= max_duration; ++i) {
        if (!surface.has_cells(i)) throw MissingCellError(surface.base_age(), i, levels.front());
    }

    std::vector<double> entries(static_cast<std::size_t>(max_duration) * levels.size());
    std::vector<double> column(static_cast<std::size_t>(max_duration));
    for (std::size_t p = 0; p < levels.size(); ++p) {
        for (int i = 1; i <= max_duration; ++i) column[static_cast<std::size_t>(i - 1)] = *surface.share(i, levels[p]);
        const auto sums = discounted_prefix_sums(column, rate);
        for (std::size_t d = 0; d < sums.size(); ++d) entries[d * levels.size() + p] = sums[d];
    }
    return {surface.base_age(), rate, std::vector<double>(levels.begin(), levels.end()), max_duration,
            std::move(entries)};
}

}  // namespace royalty
