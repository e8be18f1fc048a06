#include "royalty/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "royalty/csv.hpp"

namespace royalty {

namespace {

// Relative slack on the dollar-age boundary, so that inputs such as
// (9.1, 7.0, 0.30) that sit exactly on it in decimal still accept.
constexpr double kBoundarySlack = 1e-9;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::pair<Cents, Cents> split_even(Cents amount, int parts) {
    const auto total = amount.hundredths();
    const auto share = total / parts;
    return {Cents(share), Cents(total - share * (parts - 1))};
}

std::optional<RejectReason> check_asset(const RawAsset& asset, const IngestConfig& config,
                                        std::vector<Cents>& annual) {
    for (const auto& record : asset.records) {
        if (record.amount < Cents{0}) return RejectReason::negative_amount;
    }
    try {
        annual = annualize(asset.records);
    } catch (const IngestRejection& rejection) {
        return rejection.reason();
    }
    if (filter_zero_years(annual, config.zero_floor) == Verdict::reject) return RejectReason::zero_revenue_year;
    if (filter_dollar_age(asset.dollar_age, oldest_cashflow_age(asset.records), config.dollar_age_tolerance) ==
        Verdict::reject) {
        return RejectReason::dollar_age_mismatch;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::negative_amount: return "NEGATIVE_AMOUNT";
        case RejectReason::gap_in_history: return "GAP_IN_HISTORY";
        case RejectReason::insufficient_history: return "INSUFFICIENT_HISTORY";
        case RejectReason::zero_revenue_year: return "ZERO_REVENUE_YEAR";
        case RejectReason::dollar_age_mismatch: return "DOLLAR_AGE_MISMATCH";
    }
    return "UNKNOWN";
}

YearMonth YearMonth::parse(std::string_view text) {
    const bool shape_ok = text.size() == 7 && text[4] == '-' && is_digit(text[0]) && is_digit(text[1]) &&
                          is_digit(text[2]) && is_digit(text[3]) && is_digit(text[5]) && is_digit(text[6]);
    if (!shape_ok) throw std::invalid_argument("period_start '" + std::string(text) + "' is not YYYY-MM");
    const int year = (text[0] - '0') * 1000 + (text[1] - '0') * 100 + (text[2] - '0') * 10 + (text[3] - '0');
    const int month = (text[5] - '0') * 10 + (text[6] - '0');
    if (month < 1 || month > 12) throw std::invalid_argument("period_start '" + std::string(text) + "' has bad month");
    return {year, month};
}

YearMonth YearMonth::from_index(int index) { return {index / 12, index % 12 + 1}; }

std::string YearMonth::to_string() const {
    std::string out = std::to_string(year);
    while (out.size() < 4) out.insert(out.begin(), '0');
    out += month < 10 ? "-0" : "-";
    return out + std::to_string(month);
}

std::vector<CashflowRecord> parse_cashflows(std::istream& in, const std::string& source, NegativeAmounts negatives) {
    csv::Reader reader(in, source);
    reader.expect_header(kCashflowsHeader);

    std::vector<CashflowRecord> records;
    std::set<std::pair<std::string, int>> seen;
    while (auto fields = reader.next()) {
        if (fields->size() != 4) reader.fail("expected 4 fields, got " + std::to_string(fields->size()));
        CashflowRecord record;
        record.asset_id = (*fields)[0];
        if (record.asset_id.empty()) reader.fail("empty asset_id");
        try {
            record.period_start = YearMonth::parse((*fields)[1]);
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        const auto& frequency = (*fields)[2];
        if (frequency == "1") {
            record.period_months = 1;
        } else if (frequency == "3") {
            record.period_months = 3;
        } else {
            reader.fail("unknown frequency '" + frequency + "' (expected 1 or 3 months)");
        }
        try {
            record.amount = Cents::parse((*fields)[3]);
        } catch (const std::exception& e) {
            reader.fail(e.what());
        }
        if (record.amount < Cents{0} && negatives == NegativeAmounts::fail) {
            reader.fail("NEGATIVE_AMOUNT: amount " + record.amount.to_string() + " is negative");
        }
        if (!seen.emplace(record.asset_id, record.period_start.index()).second) {
            reader.fail("duplicate period " + record.period_start.to_string() + " for asset '" + record.asset_id + "'");
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<AssetInfo> parse_assets(std::istream& in, const std::string& source) {
    csv::Reader reader(in, source);
    reader.expect_header(kAssetsHeader);

    std::vector<AssetInfo> assets;
    std::set<std::string> seen;
    while (auto fields = reader.next()) {
        if (fields->size() != 2) reader.fail("expected 2 fields, got " + std::to_string(fields->size()));
        AssetInfo info{(*fields)[0], 0.0};
        if (info.asset_id.empty()) reader.fail("empty asset_id");
        try {
            info.dollar_age = csv::parse_real((*fields)[1]);
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        if (!(info.dollar_age > 0.0)) reader.fail("dollar_age must be > 0");
        if (!seen.insert(info.asset_id).second) reader.fail("duplicate asset '" + info.asset_id + "'");
        assets.push_back(std::move(info));
    }
    return assets;
}

std::vector<RawAsset> group_assets(std::span<const CashflowRecord> records, std::span<const AssetInfo> assets) {
    std::map<std::string, RawAsset> by_id;
    for (const auto& info : assets) {
        if (!by_id.emplace(info.asset_id, RawAsset{info.asset_id, info.dollar_age, {}}).second) {
            throw std::invalid_argument("duplicate asset '" + info.asset_id + "'");
        }
    }
    for (const auto& record : records) {
        const auto it = by_id.find(record.asset_id);
        if (it == by_id.end()) {
            throw std::invalid_argument("cashflows reference asset '" + record.asset_id +
                                        "' which is missing from the assets file");
        }
        it->second.records.push_back(record);
    }
    std::vector<RawAsset> out;
    out.reserve(by_id.size());
    for (auto& [id, asset] : by_id) {
        std::stable_sort(asset.records.begin(), asset.records.end(),
                         [](const auto& a, const auto& b) { return a.period_start < b.period_start; });
        out.push_back(std::move(asset));
    }
    return out;
}

double oldest_cashflow_age(std::span<const CashflowRecord> records) {
    if (records.empty()) throw std::domain_error("oldest_cashflow_age needs at least one record");
    int first = records.front().period_start.index();
    int last_end = records.front().end_index();
    for (const auto& record : records) {
        first = std::min(first, record.period_start.index());
        last_end = std::max(last_end, record.end_index());
    }
    return static_cast<double>(last_end - first) / 12.0;
}

std::vector<Cents> annualize(std::span<const CashflowRecord> records) {
    if (records.empty()) throw IngestRejection(RejectReason::insufficient_history, "no cashflow records");

    std::vector<Cents> months;
    int expected = records.front().period_start.index();
    for (const auto& record : records) {
        if (record.period_start.index() != expected) {
            throw IngestRejection(RejectReason::gap_in_history,
                                  "coverage breaks at " + record.period_start.to_string() + ", expected " +
                                      YearMonth::from_index(expected).to_string());
        }
        if (record.period_months == 1) {
            months.push_back(record.amount);
        } else {
            const auto [each, last] = split_even(record.amount, record.period_months);
            for (int k = 1; k < record.period_months; ++k) months.push_back(each);
            months.push_back(last);
        }
        expected = record.end_index();
    }
    if (months.size() < 12) {
        throw IngestRejection(RejectReason::insufficient_history,
                              "only " + std::to_string(months.size()) + " months of coverage");
    }

    std::vector<Cents> annual(months.size() / 12);
    for (std::size_t k = 0; k < annual.size() * 12; ++k) annual[k / 12] += months[k];
    return annual;
}

Verdict filter_zero_years(std::span<const double> annual, double zero_floor) {
    const bool any_low = std::any_of(annual.begin(), annual.end(), [&](double v) { return v <= zero_floor; });
    return any_low ? Verdict::reject : Verdict::accept;
}

Verdict filter_zero_years(std::span<const Cents> annual, double zero_floor) {
    std::vector<double> values;
    values.reserve(annual.size());
    for (const Cents c : annual) values.push_back(c.to_double());
    return filter_zero_years(std::span<const double>(values), zero_floor);
}

Verdict filter_dollar_age(double dollar_age, double oldest_age, double tolerance) {
    const double deviation = std::fabs(dollar_age - oldest_age);
    const double margin = tolerance * oldest_age;
    return deviation <= margin + kBoundarySlack * std::max(oldest_age, 1.0) ? Verdict::accept : Verdict::reject;
}

std::size_t FilterReport::count(RejectReason reason) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [&](const AssetStatus& s) { return s.reason == reason; }));
}

std::size_t FilterReport::accepted() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const AssetStatus& s) { return s.accepted(); }));
}

Dataset build_dataset(std::vector<RawAsset> raw, const IngestConfig& config) {
    std::sort(raw.begin(), raw.end(), [](const RawAsset& a, const RawAsset& b) { return a.asset_id < b.asset_id; });
    const auto dup = std::adjacent_find(raw.begin(), raw.end(),
                                        [](const RawAsset& a, const RawAsset& b) { return a.asset_id == b.asset_id; });
    if (dup != raw.end()) throw std::invalid_argument("duplicate asset '" + dup->asset_id + "'");

    Dataset dataset;
    dataset.report.entries.reserve(raw.size());
    for (auto& asset : raw) {
        std::stable_sort(asset.records.begin(), asset.records.end(),
                         [](const auto& a, const auto& b) { return a.period_start < b.period_start; });
        std::vector<Cents> annual;
        auto reason = check_asset(asset, config, annual);
        if (!reason) {
            dataset.assets.emplace_back(asset.dollar_age, AnnualSeries(asset.asset_id, std::move(annual)));
        }
        dataset.report.entries.push_back(AssetStatus{asset.asset_id, reason});
    }
    return dataset;
}

std::string report_csv(const FilterReport& report) {
    std::string out = "asset_id,status,reason\n";
    for (const auto& entry : report.entries) {
        out += entry.asset_id;
        out += entry.accepted() ? ",accepted," : ",rejected,";
        if (entry.reason) out += to_string(*entry.reason);
        out += '\n';
    }
    return out;
}

std::string report_summary_json(const FilterReport& report) {
    nlohmann::ordered_json reasons = nlohmann::ordered_json::object();
    for (const auto reason : kRejectReasons) reasons[std::string(to_string(reason))] = report.count(reason);
    nlohmann::ordered_json summary = {
        {"total", report.entries.size()},
        {"accepted", report.accepted()},
        {"rejected", report.rejected()},
        {"reasons", reasons},
    };
    return summary.dump(2) + "\n";
}

std::string cashflows_csv(std::span<const RawAsset> assets) {
    std::string out(kCashflowsHeader);
    out += '\n';
    for (const auto& asset : assets) {
        for (const auto& r : asset.records) {
            out += r.asset_id + ',' + r.period_start.to_string() + ',' + std::to_string(r.period_months) + ',' +
                   r.amount.to_string() + '\n';
        }
    }
    return out;
}

std::string assets_csv(std::span<const RawAsset> assets) {
    std::string out(kAssetsHeader);
    out += '\n';
    for (const auto& asset : assets) out += asset.asset_id + ',' + csv::round_trip(asset.dollar_age) + '\n';
    return out;
}

std::array<Cents, 12> split_annual(Cents annual) {
    const auto [each, last] = split_even(annual, 12);
    std::array<Cents, 12> months;
    months.fill(each);
    months.back() = last;
    return months;
}

RawAsset to_raw(const Asset& asset, YearMonth first_month) {
    RawAsset raw{asset.asset_id(), asset.dollar_age, {}};
    int month = first_month.index();
    for (const Cents annual : asset.series.amounts()) {
        for (const Cents amount : split_annual(annual)) {
            raw.records.push_back(CashflowRecord{asset.asset_id(), YearMonth::from_index(month++), 1, amount});
        }
    }
    return raw;
}

}  // namespace royalty
