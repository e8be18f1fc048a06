#include "royalty/market.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include <json.hpp>

#include "royalty/csv.hpp"

namespace royalty {

namespace {

constexpr double kBoundarySlack = 1e-12;

std::string optional_fixed(const std::optional<double>& value, int digits) {
    return value ? csv::fixed(*value, digits) : std::string();
}

nlohmann::ordered_json optional_json(const std::optional<double>& value) {
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

auto quote_key(const MarketQuote& q) {
    return std::make_tuple(std::cref(q.asset_id), q.duration_years, q.dollar_age, q.ltm, q.best_bid.value_or(-1.0),
                           q.ask);
}

nlohmann::ordered_json plot_json(std::span<const PlotRow> rows) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        out.push_back({{"axis_value", row.axis_value},
                       {"n", row.n},
                       {"mean_bid_mult", optional_json(row.mean_bid_multiplier)},
                       {"mean_ask_mult", row.mean_ask_multiplier},
                       {"mean_m10", row.mean_m10},
                       {"mean_m50", row.mean_m50},
                       {"mean_m90", row.mean_m90}});
    }
    return out;
}

}  // namespace

ImpliedMultipliers implied_multipliers(const MarketQuote& quote) {
    if (!std::isfinite(quote.ltm) || quote.ltm <= 0.0) {
        throw std::domain_error("quote '" + quote.asset_id + "' has non-positive LTM");
    }
    ImpliedMultipliers out;
    if (quote.best_bid) out.bid = *quote.best_bid / quote.ltm;
    out.ask = quote.ask / quote.ltm;
    return out;
}

std::string_view to_string(QuoteRejectReason reason) {
    switch (reason) {
        case QuoteRejectReason::duration_too_long: return "DURATION_TOO_LONG";
        case QuoteRejectReason::bid_too_low: return "BID_TOO_LOW";
    }
    return "UNKNOWN";
}

QuoteFilterResult filter_quotes(std::span<const MarketQuote> quotes, const QuoteFilterOptions& options) {
    if (options.max_duration < 1) throw std::domain_error("max duration must be >= 1");
    if (!(options.min_bid_ask_ratio >= 0.0 && options.min_bid_ask_ratio <= 1.0)) {
        throw std::domain_error("min bid/ask ratio must lie in [0,1]");
    }
    QuoteFilterResult result;
    for (const auto& quote : quotes) {
        if (quote.duration_years > options.max_duration) {
            result.rejected.push_back({quote, QuoteRejectReason::duration_too_long});
            continue;
        }
        const auto implied = implied_multipliers(quote);
        if (implied.bid) {
            const double floor = options.min_bid_ask_ratio * implied.ask;
            if (*implied.bid < floor - kBoundarySlack * floor) {
                result.rejected.push_back({quote, QuoteRejectReason::bid_too_low});
                continue;
            }
        }
        result.accepted.push_back(quote);
    }
    return result;
}

int round_age(double dollar_age, AgeRounding rounding) {
    const double rounded = rounding == AgeRounding::half_up ? std::floor(dollar_age + 0.5) : std::floor(dollar_age);
    return static_cast<int>(rounded);
}

int select_base_age(const SurfaceSet& surfaces, double dollar_age, AgeRounding rounding) {
    if (surfaces.empty()) throw std::out_of_range("no share surfaces available");
    const int wanted = round_age(dollar_age, rounding);

    auto it = surfaces.lower_bound(wanted);
    if (it == surfaces.end()) {
        it = std::prev(it);
    } else if (it->first != wanted && it != surfaces.begin()) {
        const auto below = std::prev(it);
        if (wanted - below->first <= it->first - wanted) it = below;
    }
    return it->first;
}

ModelBand model_band(const SurfaceSet& surfaces, double dollar_age, int duration, double rate, AgeRounding rounding) {
    const auto it = surfaces.find(select_base_age(surfaces, dollar_age, rounding));
    const ShareSurface& surface = it->second;
    for (const double level : {10.0, 50.0, 90.0}) {
        if (!surface.level_index(level)) {
            throw std::out_of_range("surface for base age " + std::to_string(it->first) + " lacks level " +
                                    std::to_string(static_cast<int>(level)));
        }
    }
    const auto table = multiplier_table(surface, rate, duration);
    return {it->first, table.entry(duration, 10.0), table.entry(duration, 50.0), table.entry(duration, 90.0)};
}

ComparisonResult compare(std::span<const MarketQuote> quotes, const SurfaceSet& surfaces, double rate,
                         AgeRounding rounding) {
    std::vector<const MarketQuote*> ordered;
    ordered.reserve(quotes.size());
    for (const auto& quote : quotes) ordered.push_back(&quote);
    std::sort(ordered.begin(), ordered.end(),
              [](const MarketQuote* a, const MarketQuote* b) { return quote_key(*a) < quote_key(*b); });

    ComparisonResult result;
    for (const MarketQuote* quote : ordered) {
        try {
            const auto implied = implied_multipliers(*quote);
            const auto band = model_band(surfaces, quote->dollar_age, quote->duration_years, rate, rounding);
            ComparisonRow row;
            row.asset_id = quote->asset_id;
            row.duration = quote->duration_years;
            row.dollar_age = quote->dollar_age;
            row.base_age = band.base_age;
            row.bid_multiplier = implied.bid;
            row.ask_multiplier = implied.ask;
            row.model_m10 = band.m10;
            row.model_m50 = band.m50;
            row.model_m90 = band.m90;
            if (implied.bid) row.bid_gap_to_m10 = *implied.bid - band.m10;
            row.ask_gap_to_m50 = implied.ask - band.m50;
            result.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            result.errors.push_back({quote->asset_id, quote->duration_years, quote->dollar_age, e.what()});
        }
    }
    return result;
}

std::vector<PlotRow> aggregate_plot_data(std::span<const ComparisonRow> rows, PlotAxis axis) {
    struct Sums {
        std::size_t n = 0;
        std::size_t bids = 0;
        long double bid = 0, ask = 0, m10 = 0, m50 = 0, m90 = 0, bid_gap = 0, ask_gap = 0;
    };
    std::map<int, Sums> groups;
    for (const auto& row : rows) {
        const int key = axis == PlotAxis::duration ? row.duration : round_age(row.dollar_age);
        auto& s = groups[key];
        ++s.n;
        if (row.bid_multiplier) {
            ++s.bids;
            s.bid += *row.bid_multiplier;
            s.bid_gap += std::fabs(*row.bid_gap_to_m10);
        }
        s.ask += row.ask_multiplier;
        s.m10 += row.model_m10;
        s.m50 += row.model_m50;
        s.m90 += row.model_m90;
        s.ask_gap += std::fabs(row.ask_gap_to_m50);
    }

    std::vector<PlotRow> out;
    out.reserve(groups.size());
    for (const auto& [key, s] : groups) {
        const auto n = static_cast<long double>(s.n);
        PlotRow row;
        row.axis_value = key;
        row.n = s.n;
        if (s.bids > 0) {
            const auto b = static_cast<long double>(s.bids);
            row.mean_bid_multiplier = static_cast<double>(s.bid / b);
            row.mean_abs_bid_gap_to_m10 = static_cast<double>(s.bid_gap / b);
        }
        row.mean_ask_multiplier = static_cast<double>(s.ask / n);
        row.mean_m10 = static_cast<double>(s.m10 / n);
        row.mean_m50 = static_cast<double>(s.m50 / n);
        row.mean_m90 = static_cast<double>(s.m90 / n);
        row.mean_abs_ask_gap_to_m50 = static_cast<double>(s.ask_gap / n);
        out.push_back(row);
    }
    return out;
}

std::vector<MarketQuote> parse_quotes(std::istream& in, const std::string& source) {
    csv::Reader reader(in, source);
    reader.expect_header(kQuotesHeader);
    std::vector<MarketQuote> quotes;
    while (auto fields = reader.next()) {
        if (fields->size() != 6) reader.fail("expected 6 fields, got " + std::to_string(fields->size()));
        MarketQuote quote;
        quote.asset_id = (*fields)[0];
        if (quote.asset_id.empty()) reader.fail("empty asset_id");
        try {
            quote.ltm = csv::parse_real((*fields)[1]);
            if (!(*fields)[2].empty()) quote.best_bid = csv::parse_real((*fields)[2]);
            quote.ask = csv::parse_real((*fields)[3]);
            const auto duration = csv::parse_integer((*fields)[4]);
            if (duration < 1 || duration > 1000) reader.fail("duration_years must be a positive integer");
            quote.duration_years = static_cast<int>(duration);
            quote.dollar_age = csv::parse_real((*fields)[5]);
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        if (!(quote.ltm > 0.0)) reader.fail("ltm must be > 0");
        if (!(quote.ask > 0.0)) reader.fail("ask must be > 0");
        if (quote.best_bid && !(*quote.best_bid >= 0.0)) reader.fail("best_bid must be >= 0");
        if (!(quote.dollar_age > 0.0)) reader.fail("dollar_age must be > 0");
        quotes.push_back(std::move(quote));
    }
    return quotes;
}

std::string quotes_csv(std::span<const MarketQuote> quotes) {
    std::string out(kQuotesHeader);
    out += '\n';
    for (const auto& q : quotes) {
        out += q.asset_id + ',' + csv::round_trip(q.ltm) + ',' + (q.best_bid ? csv::round_trip(*q.best_bid) : "") +
               ',' + csv::round_trip(q.ask) + ',' + std::to_string(q.duration_years) + ',' +
               csv::round_trip(q.dollar_age) + '\n';
    }
    return out;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
    std::string out(kComparisonHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += r.asset_id + ',' + std::to_string(r.duration) + ',' + csv::round_trip(r.dollar_age) + ',' +
               optional_fixed(r.bid_multiplier, 6) + ',' + csv::fixed(r.ask_multiplier, 6) + ',' +
               csv::fixed(r.model_m10, 6) + ',' + csv::fixed(r.model_m50, 6) + ',' + csv::fixed(r.model_m90, 6) + ',' +
               optional_fixed(r.bid_gap_to_m10, 6) + ',' + csv::fixed(r.ask_gap_to_m50, 6) + '\n';
    }
    return out;
}

std::string comparison_errors_csv(std::span<const ComparisonError> errors) {
    std::string out = "asset_id,duration,dollar_age,error\n";
    for (const auto& e : errors) {
        std::string message = e.message;
        std::replace(message.begin(), message.end(), ',', ';');
        out += e.asset_id + ',' + std::to_string(e.duration) + ',' + csv::round_trip(e.dollar_age) + ',' + message +
               '\n';
    }
    return out;
}

std::string rejected_quotes_csv(std::span<const RejectedQuote> rejected) {
    std::string out = "asset_id,duration_years,reason\n";
    for (const auto& r : rejected) {
        out += r.quote.asset_id + ',' + std::to_string(r.quote.duration_years) + ',' + std::string(to_string(r.reason)) +
               '\n';
    }
    return out;
}

std::string plot_csv(std::span<const PlotRow> rows) {
    std::string out(kPlotHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.axis_value) + ',' + std::to_string(r.n) + ',' + optional_fixed(r.mean_bid_multiplier, 6) +
               ',' + csv::fixed(r.mean_ask_multiplier, 6) + ',' + csv::fixed(r.mean_m10, 6) + ',' +
               csv::fixed(r.mean_m50, 6) + ',' + csv::fixed(r.mean_m90, 6) + '\n';
    }
    return out;
}

std::string comparison_json(const ComparisonResult& result, std::span<const RejectedQuote> rejected,
                            std::span<const PlotRow> by_duration, std::span<const PlotRow> by_dollar_age) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"asset_id", r.asset_id},
                        {"duration", r.duration},
                        {"dollar_age", r.dollar_age},
                        {"base_age", r.base_age},
                        {"bid_multiplier", optional_json(r.bid_multiplier)},
                        {"ask_multiplier", r.ask_multiplier},
                        {"model_m10", r.model_m10},
                        {"model_m50", r.model_m50},
                        {"model_m90", r.model_m90},
                        {"bid_gap_to_m10", optional_json(r.bid_gap_to_m10)},
                        {"ask_gap_to_m50", r.ask_gap_to_m50}});
    }
    auto errors = nlohmann::ordered_json::array();
    for (const auto& e : result.errors) {
        errors.push_back(
            {{"asset_id", e.asset_id}, {"duration", e.duration}, {"dollar_age", e.dollar_age}, {"error", e.message}});
    }
    auto rejected_json = nlohmann::ordered_json::array();
    for (const auto& r : rejected) {
        rejected_json.push_back({{"asset_id", r.quote.asset_id},
                                 {"duration_years", r.quote.duration_years},
                                 {"reason", std::string(to_string(r.reason))}});
    }
    nlohmann::ordered_json doc = {
        {"rows", rows},
        {"errors", errors},
        {"rejected", rejected_json},
        {"by_duration", plot_json(by_duration)},
        {"by_dollar_age", plot_json(by_dollar_age)},
    };
    return doc.dump(2) + "\n";
}

}  // namespace royalty
