#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "royalty/model.hpp"
#include "royalty/money.hpp"

namespace royalty {

/// Why an asset was left out of the dataset. Checks run in declaration order
/// and the first failure wins.
enum class RejectReason {
    negative_amount,
    gap_in_history,
    insufficient_history,
    zero_revenue_year,
    dollar_age_mismatch,
};

inline constexpr std::array kRejectReasons = {
    RejectReason::negative_amount,    RejectReason::gap_in_history,      RejectReason::insufficient_history,
    RejectReason::zero_revenue_year,  RejectReason::dollar_age_mismatch,
};

/// Report code, e.g. "GAP_IN_HISTORY".
std::string_view to_string(RejectReason reason);

enum class Verdict { accept, reject };

/// Calendar month.
struct YearMonth {
    int year = 0;
    int month = 1;  // 1..12

    /// Strict `YYYY-MM`. Throws std::invalid_argument.
    static YearMonth parse(std::string_view text);
    static YearMonth from_index(int index);

    [[nodiscard]] int index() const { return year * 12 + (month - 1); }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const YearMonth&, const YearMonth&) = default;
    friend auto operator<=>(const YearMonth& a, const YearMonth& b) { return a.index() <=> b.index(); }
};

struct CashflowRecord {
    std::string asset_id;
    YearMonth period_start;
    int period_months = 1;  // 1 (monthly) or 3 (quarterly)
    Cents amount;

    [[nodiscard]] int end_index() const { return period_start.index() + period_months; }

    friend bool operator==(const CashflowRecord&, const CashflowRecord&) = default;
};

struct RawAsset {
    std::string asset_id;
    double dollar_age = 0.0;
    std::vector<CashflowRecord> records;  // sorted by period_start

    friend bool operator==(const RawAsset&, const RawAsset&) = default;
};

struct AssetInfo {
    std::string asset_id;
    double dollar_age = 0.0;
};

/// An asset-level failure raised by annualize.
class IngestRejection : public std::runtime_error {
public:
    IngestRejection(RejectReason reason, const std::string& message)
        : std::runtime_error(message), reason_(reason) {}

    [[nodiscard]] RejectReason reason() const { return reason_; }

private:
    RejectReason reason_;
};

/// Whether negative amounts abort parsing or are passed on so that
/// build_dataset can reject the owning asset with NEGATIVE_AMOUNT.
enum class NegativeAmounts { fail, keep };

inline constexpr std::string_view kCashflowsHeader = "asset_id,period_start,period_months,amount";
inline constexpr std::string_view kAssetsHeader = "asset_id,dollar_age";

/// Parses `cashflows.csv`. Rows keep their file order. Throws ParseError with
/// the 1-based line for malformed rows, unknown frequencies, duplicate
/// (asset_id, period_start) pairs, and (by default) negative amounts.
std::vector<CashflowRecord> parse_cashflows(std::istream& in, const std::string& source = "cashflows.csv",
                                            NegativeAmounts negatives = NegativeAmounts::fail);

/// Parses `assets.csv`; duplicate ids and non-positive ages throw ParseError.
std::vector<AssetInfo> parse_assets(std::istream& in, const std::string& source = "assets.csv");

/// Joins cashflow rows onto the asset list. Records are sorted per asset;
/// assets without rows get an empty record list. Throws std::invalid_argument
/// for cashflows whose asset is missing from `assets`.
std::vector<RawAsset> group_assets(std::span<const CashflowRecord> records, std::span<const AssetInfo> assets);

/// Years from the first covered month to the end of the last covered period.
double oldest_cashflow_age(std::span<const CashflowRecord> records);

/// Annual buckets running forward from the first covered month. Quarterly
/// amounts are spread over their three months (remainder cents on the last
/// month); a trailing partial year is dropped. Throws IngestRejection with
/// GAP_IN_HISTORY or INSUFFICIENT_HISTORY.
std::vector<Cents> annualize(std::span<const CashflowRecord> records);

/// Rejects when any annual amount is at or below `zero_floor`.
Verdict filter_zero_years(std::span<const double> annual, double zero_floor = 0.0);
Verdict filter_zero_years(std::span<const Cents> annual, double zero_floor = 0.0);

/// Accepts when |dollar_age - oldest_age| <= tolerance * oldest_age. Equality
/// at the boundary accepts, allowing for a few ulps of representation error.
Verdict filter_dollar_age(double dollar_age, double oldest_age, double tolerance = 0.30);

struct IngestConfig {
    double dollar_age_tolerance = 0.30;
    double zero_floor = 0.0;
};

struct AssetStatus {
    std::string asset_id;
    std::optional<RejectReason> reason;  // empty when accepted

    [[nodiscard]] bool accepted() const { return !reason.has_value(); }
    friend bool operator==(const AssetStatus&, const AssetStatus&) = default;
};

struct FilterReport {
    std::vector<AssetStatus> entries;  // sorted by asset_id

    [[nodiscard]] std::size_t count(RejectReason reason) const;
    [[nodiscard]] std::size_t accepted() const;
    [[nodiscard]] std::size_t rejected() const { return entries.size() - accepted(); }

    friend bool operator==(const FilterReport&, const FilterReport&) = default;
};

struct Dataset {
    std::vector<Asset> assets;  // sorted by asset_id
    FilterReport report;
};

/// Runs field validation, annualization, the zero-revenue filter and the
/// dollar-age filter on every asset. Never throws for data problems; each
/// asset lands in the report exactly once. Duplicate ids throw
/// std::invalid_argument.
Dataset build_dataset(std::vector<RawAsset> raw, const IngestConfig& config = {});

/// `asset_id,status,reason` rows in asset_id order.
std::string report_csv(const FilterReport& report);
/// {"total", "accepted", "rejected", "reasons": {CODE: n, ...}}
std::string report_summary_json(const FilterReport& report);

std::string cashflows_csv(std::span<const RawAsset> assets);
std::string assets_csv(std::span<const RawAsset> assets);

/// Monthly records reproducing an accepted asset's annual series, starting at
/// `first_month`. Each annual amount is split evenly with the remainder cents
/// on the twelfth month.
RawAsset to_raw(const Asset& asset, YearMonth first_month);

/// Splits an annual amount into twelve monthly amounts that sum to it exactly.
std::array<Cents, 12> split_annual(Cents annual);

}  // namespace royalty
