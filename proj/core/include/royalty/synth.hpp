#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "royalty/curves.hpp"
#include "royalty/ingest.hpp"
#include "royalty/market.hpp"

namespace royalty {

/// A block of identical-law synthetic assets.
struct PopulationGroup {
    int count = 1;
    double annual_growth = 0.0;  // g > -1
    double noise_sigma = 0.0;    // log-normal sigma >= 0
    int age_years = 2;           // >= 2
    double initial_revenue = 1.0;
};

/// Optional quote generation settings carried by a population spec file.
struct QuoteSpec {
    double bid_level = 10.0;
    double ask_level = 50.0;
    double noise = 0.0;
};

struct PopulationSpec {
    std::vector<PopulationGroup> groups;
    std::uint64_t seed = 0;
    std::optional<QuoteSpec> quotes;
};

/// Invalid population spec; the message names the offending field.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws SpecError on any violated field constraint.
void validate(const PopulationSpec& spec);

/// Reads the JSON form:
/// {"seed": u64, "groups": [{"count", "annual_growth", "noise_sigma",
///  "age_years", "initial_revenue"}], "quotes": {"bid_level", "ask_level",
///  "noise"}}. Unknown keys are rejected. Throws SpecError.
PopulationSpec parse_population_spec(std::string_view json);

/// SplitMix64 finalizer applied to (master, index); per-asset seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Standard normal draws by inverse CDF on the top 53 bits of a
/// std::mt19937_64 stream. Fully specified, so identical on every platform.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double next();

private:
    std::mt19937_64 engine_;
};

/// Monthly records for one asset whose annual totals follow
/// initial * (1+g)^(k-1) * exp(sigma * z_k), rounded to cents and split
/// evenly over the twelve months of each year. The last month covered is
/// `last_month`; dollar age equals age_years.
RawAsset gen_asset(std::uint64_t seed, int age_years, double initial, double growth, double sigma,
                   std::string asset_id = "SYN000001", YearMonth last_month = {2023, 12});

/// Every asset of every group, ids SYN000001, SYN000002, ... in group order.
/// Output does not depend on `threads`.
std::vector<RawAsset> gen_population(const PopulationSpec& spec, unsigned threads = 1);

/// Multiplier of geometric shares (1+g)^i discounted at r:
/// q(1-q^d)/(1-q) with q = (1+g)/(1+r), or d when q is 1.
double closed_form_multiplier(double growth, double rate, int duration);

struct QuoteGenOptions {
    double rate = kDefaultDiscountRate;
    double bid_level = 10.0;
    double ask_level = 50.0;
    std::uint64_t seed = 0;
    double noise = 0.0;
    int max_duration = kDefaultMaxDuration;
};

/// One quote per asset whose selected surface has at least horizon 1:
/// ltm is the last annual amount, bid and ask are ltm times the model
/// multiplier at the requested levels times (1 + eta), eta uniform in
/// [-noise, noise]; the duration is drawn from 1..min(max_duration, horizons
/// available).
std::vector<MarketQuote> gen_quotes(std::span<const Asset> dataset, const SurfaceSet& surfaces,
                                    const QuoteGenOptions& options);

}  // namespace royalty
