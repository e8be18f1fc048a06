#include "royalty/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

namespace royalty {

namespace {

constexpr double kUnitTolerance = 1e-12;

template <typename T>
T read_field(const nlohmann::json& object, const std::string& where, const char* key) {
    if (!object.contains(key)) throw SpecError(where + "." + key + ": missing");
    try {
        return object.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw SpecError(where + "." + key + ": wrong type");
    }
}

void reject_unknown_keys(const nlohmann::json& object, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
    if (!object.is_object()) throw SpecError(where + ": expected an object");
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw SpecError(where + "." + key + ": unknown field");
        }
    }
}

bool is_band_level(double level) { return level == 10.0 || level == 50.0 || level == 90.0; }

}  // namespace

void validate(const PopulationSpec& spec) {
    if (spec.groups.empty()) throw SpecError("groups: at least one group is required");
    for (std::size_t k = 0; k < spec.groups.size(); ++k) {
        const auto& g = spec.groups[k];
        const std::string where = "groups[" + std::to_string(k) + "]";
        if (g.count < 1) throw SpecError(where + ".count: must be >= 1");
        if (!std::isfinite(g.annual_growth) || g.annual_growth <= -1.0) {
            throw SpecError(where + ".annual_growth: must be > -1");
        }
        if (!std::isfinite(g.noise_sigma) || g.noise_sigma < 0.0) throw SpecError(where + ".noise_sigma: must be >= 0");
        if (g.age_years < 2) throw SpecError(where + ".age_years: must be >= 2");
        if (!std::isfinite(g.initial_revenue) || g.initial_revenue <= 0.0) {
            throw SpecError(where + ".initial_revenue: must be > 0");
        }
    }
    if (spec.quotes) {
        if (!is_band_level(spec.quotes->bid_level)) throw SpecError("quotes.bid_level: must be 10, 50 or 90");
        if (!is_band_level(spec.quotes->ask_level)) throw SpecError("quotes.ask_level: must be 10, 50 or 90");
        if (!std::isfinite(spec.quotes->noise) || spec.quotes->noise < 0.0 || spec.quotes->noise >= 1.0) {
            throw SpecError("quotes.noise: must lie in [0, 1)");
        }
    }
}

PopulationSpec parse_population_spec(std::string_view json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("malformed JSON: ") + e.what());
    }
    reject_unknown_keys(doc, "spec", {"seed", "groups", "quotes"});

    PopulationSpec spec;
    if (!doc.contains("seed") || !doc.at("seed").is_number_unsigned()) {
        throw SpecError("spec.seed: must be a non-negative integer");
    }
    spec.seed = doc.at("seed").get<std::uint64_t>();

    if (!doc.contains("groups") || !doc.at("groups").is_array()) throw SpecError("spec.groups: must be an array");
    const auto& groups = doc.at("groups");
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const std::string where = "groups[" + std::to_string(k) + "]";
        const auto& item = groups[k];
        reject_unknown_keys(item, where, {"count", "annual_growth", "noise_sigma", "age_years", "initial_revenue"});
        PopulationGroup group;
        group.count = read_field<int>(item, where, "count");
        group.annual_growth = read_field<double>(item, where, "annual_growth");
        group.noise_sigma = item.contains("noise_sigma") ? read_field<double>(item, where, "noise_sigma") : 0.0;
        group.age_years = read_field<int>(item, where, "age_years");
        group.initial_revenue = read_field<double>(item, where, "initial_revenue");
        spec.groups.push_back(group);
    }

    if (doc.contains("quotes")) {
        const auto& q = doc.at("quotes");
        reject_unknown_keys(q, "quotes", {"bid_level", "ask_level", "noise"});
        QuoteSpec quotes;
        if (q.contains("bid_level")) quotes.bid_level = read_field<double>(q, "quotes", "bid_level");
        if (q.contains("ask_level")) quotes.ask_level = read_field<double>(q, "quotes", "ask_level");
        if (q.contains("noise")) quotes.noise = read_field<double>(q, "quotes", "noise");
        spec.quotes = quotes;
    }
    validate(spec);
    return spec;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double NormalStream::uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, uniform());
}

RawAsset gen_asset(std::uint64_t seed, int age_years, double initial, double growth, double sigma,
                   std::string asset_id, YearMonth last_month) {
    validate(PopulationSpec{{PopulationGroup{1, growth, sigma, age_years, initial}}, seed, std::nullopt});

    NormalStream noise(seed);
    RawAsset asset{std::move(asset_id), static_cast<double>(age_years), {}};
    asset.records.reserve(static_cast<std::size_t>(age_years) * 12);
    int month = last_month.index() - 12 * age_years + 1;
    for (int k = 1; k <= age_years; ++k) {
        double annual = initial * std::pow(1.0 + growth, k - 1);
        if (sigma > 0.0) annual *= std::exp(sigma * noise.next());
        for (const Cents amount : split_annual(Cents::from_double(annual))) {
            asset.records.push_back(CashflowRecord{asset.asset_id, YearMonth::from_index(month++), 1, amount});
        }
    }
    return asset;
}

std::vector<RawAsset> gen_population(const PopulationSpec& spec, unsigned threads) {
    validate(spec);
    struct Job {
        const PopulationGroup* group;
        std::string id;
    };
    std::vector<Job> jobs;
    for (const auto& group : spec.groups) {
        for (int k = 0; k < group.count; ++k) {
            std::string id = std::to_string(jobs.size() + 1);
            id.insert(0, id.size() < 6 ? 6 - id.size() : 0, '0');
            jobs.push_back({&group, "SYN" + id});
        }
    }

    std::vector<RawAsset> assets(jobs.size());
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t k = first; k < jobs.size(); k += stride) {
            const auto& g = *jobs[k].group;
            assets[k] = gen_asset(derive_seed(spec.seed, k), g.age_years, g.initial_revenue, g.annual_growth,
                                  g.noise_sigma, jobs[k].id);
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs.size(), 1));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    }
    return assets;
}

double closed_form_multiplier(double growth, double rate, int duration) {
    if (!(growth > -1.0) || !(rate >= 0.0) || duration < 1) {
        throw std::domain_error("closed_form_multiplier needs g > -1, r >= 0, d >= 1");
    }
    const long double q = (1.0L + growth) / (1.0L + rate);
    if (std::fabs(q - 1.0L) <= kUnitTolerance) return static_cast<double>(duration);
    return static_cast<double>(q * (1.0L - std::pow(q, duration)) / (1.0L - q));
}

std::vector<MarketQuote> gen_quotes(std::span<const Asset> dataset, const SurfaceSet& surfaces,
                                    const QuoteGenOptions& options) {
    if (!is_band_level(options.bid_level) || !is_band_level(options.ask_level)) {
        throw std::domain_error("quote levels must be 10, 50 or 90");
    }
    if (!(options.noise >= 0.0 && options.noise < 1.0)) throw std::domain_error("quote noise must lie in [0, 1)");

    std::vector<MarketQuote> quotes;
    if (surfaces.empty()) return quotes;
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        const Asset& asset = dataset[k];
        const ShareSurface& surface = surfaces.at(select_base_age(surfaces, asset.dollar_age));
        const int available = std::min(options.max_duration, surface.contiguous_horizons());
        if (available < 1) continue;

        NormalStream stream(derive_seed(options.seed, k));
        const int duration = 1 + static_cast<int>(stream.uniform() * available);
        const auto table = multiplier_table(surface, options.rate, duration);
        const double ltm = asset.series.last().to_double();
        const double bid_noise = options.noise * (2.0 * stream.uniform() - 1.0);
        const double ask_noise = options.noise * (2.0 * stream.uniform() - 1.0);

        MarketQuote quote;
        quote.asset_id = asset.asset_id();
        quote.ltm = ltm;
        quote.best_bid = ltm * table.entry(duration, options.bid_level) * (1.0 + bid_noise);
        quote.ask = ltm * table.entry(duration, options.ask_level) * (1.0 + ask_noise);
        quote.duration_years = duration;
        quote.dollar_age = asset.dollar_age;
        quotes.push_back(std::move(quote));
    }
    return quotes;
}

}  // namespace royalty
