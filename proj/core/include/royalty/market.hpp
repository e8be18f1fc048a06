#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "royalty/curves.hpp"
#include "royalty/model.hpp"

namespace royalty {

inline constexpr double kDefaultMinBidAskRatio = 0.5;

/// Observed marketplace listing.
struct MarketQuote {
    std::string asset_id;
    double ltm = 0.0;
    std::optional<double> best_bid;
    double ask = 0.0;
    int duration_years = 1;
    double dollar_age = 0.0;

    friend bool operator==(const MarketQuote&, const MarketQuote&) = default;
};

struct ImpliedMultipliers {
    std::optional<double> bid;
    double ask = 0.0;
};

/// Price over LTM for the bid (when present) and the ask.
ImpliedMultipliers implied_multipliers(const MarketQuote& quote);

enum class QuoteRejectReason { duration_too_long, bid_too_low };

std::string_view to_string(QuoteRejectReason reason);

struct RejectedQuote {
    MarketQuote quote;
    QuoteRejectReason reason;
};

struct QuoteFilterOptions {
    int max_duration = kDefaultMaxDuration;
    double min_bid_ask_ratio = kDefaultMinBidAskRatio;
};

struct QuoteFilterResult {
    std::vector<MarketQuote> accepted;
    std::vector<RejectedQuote> rejected;
};

/// Keeps quotes with duration <= max_duration whose bid multiplier (if any)
/// is at least min_bid_ask_ratio times the ask multiplier. Duration is
/// checked first. Input order is preserved on both sides.
QuoteFilterResult filter_quotes(std::span<const MarketQuote> quotes, const QuoteFilterOptions& options = {});

enum class AgeRounding { half_up, floor };

int round_age(double dollar_age, AgeRounding rounding = AgeRounding::half_up);

/// Base age of the surface used for a quote: the rounded dollar age when a
/// surface exists for it, otherwise the closest available age (ties go to the
/// younger one). Throws std::out_of_range when the set is empty.
int select_base_age(const SurfaceSet& surfaces, double dollar_age, AgeRounding rounding = AgeRounding::half_up);

/// Model multipliers at the 10th, 50th and 90th percentile for one duration.
struct ModelBand {
    int base_age = 0;
    double m10 = 0.0;
    double m50 = 0.0;
    double m90 = 0.0;
};

/// Evaluates the band on the surface chosen by select_base_age. Throws
/// MissingCellError when that surface is too short, std::out_of_range when the
/// set is empty or the surface lacks a band level.
ModelBand model_band(const SurfaceSet& surfaces, double dollar_age, int duration, double rate,
                     AgeRounding rounding = AgeRounding::half_up);

struct ComparisonRow {
    std::string asset_id;
    int duration = 0;
    double dollar_age = 0.0;
    int base_age = 0;
    std::optional<double> bid_multiplier;
    double ask_multiplier = 0.0;
    double model_m10 = 0.0;
    double model_m50 = 0.0;
    double model_m90 = 0.0;
    std::optional<double> bid_gap_to_m10;
    double ask_gap_to_m50 = 0.0;
};

struct ComparisonError {
    std::string asset_id;
    int duration = 0;
    double dollar_age = 0.0;
    std::string message;
};

struct ComparisonResult {
    std::vector<ComparisonRow> rows;      // sorted by asset_id
    std::vector<ComparisonError> errors;  // sorted by asset_id
};

/// Compares every quote against the model band of its age and duration.
/// Quotes whose band cannot be evaluated become error entries.
ComparisonResult compare(std::span<const MarketQuote> quotes, const SurfaceSet& surfaces, double rate,
                         AgeRounding rounding = AgeRounding::half_up);

enum class PlotAxis { duration, dollar_age };

struct PlotRow {
    int axis_value = 0;
    std::size_t n = 0;
    std::optional<double> mean_bid_multiplier;  // over rows that have a bid
    double mean_ask_multiplier = 0.0;
    double mean_m10 = 0.0;
    double mean_m50 = 0.0;
    double mean_m90 = 0.0;
    std::optional<double> mean_abs_bid_gap_to_m10;
    double mean_abs_ask_gap_to_m50 = 0.0;
};

/// Group means by duration or by dollar age rounded half up, ascending.
std::vector<PlotRow> aggregate_plot_data(std::span<const ComparisonRow> rows, PlotAxis axis);

inline constexpr std::string_view kQuotesHeader = "asset_id,ltm,best_bid,ask,duration_years,dollar_age";
inline constexpr std::string_view kComparisonHeader =
    "asset_id,duration,dollar_age,bid_multiplier,ask_multiplier,model_m10,model_m50,model_m90,bid_gap_to_m10,"
    "ask_gap_to_m50";
inline constexpr std::string_view kPlotHeader = "axis_value,n,mean_bid_mult,mean_ask_mult,mean_m10,mean_m50,mean_m90";

/// Empty best_bid means no bid. Throws ParseError.
std::vector<MarketQuote> parse_quotes(std::istream& in, const std::string& source = "quotes.csv");
/// Full-precision `quotes.csv`.
std::string quotes_csv(std::span<const MarketQuote> quotes);

std::string comparison_csv(std::span<const ComparisonRow> rows);
std::string comparison_errors_csv(std::span<const ComparisonError> errors);
std::string rejected_quotes_csv(std::span<const RejectedQuote> rejected);
std::string plot_csv(std::span<const PlotRow> rows);

/// Everything compare produces, at full precision.
std::string comparison_json(const ComparisonResult& result, std::span<const RejectedQuote> rejected,
                            std::span<const PlotRow> by_duration, std::span<const PlotRow> by_dollar_age);

}  // namespace royalty
