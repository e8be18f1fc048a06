#include "royalty_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace royalty::cli {

namespace {

template <typename T>
T field(const nlohmann::json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    return std::nullopt;
}

Config parse_config(std::string_view json, Config base) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    for (const auto& [key, value] : doc.items()) {
        if (key == "rate") {
            base.rate = field<double>(doc, "rate");
        } else if (key == "percentile_levels") {
            base.percentile_levels = field<std::vector<double>>(doc, "percentile_levels");
        } else if (key == "dollar_age_tolerance") {
            base.dollar_age_tolerance = field<double>(doc, "dollar_age_tolerance");
        } else if (key == "zero_floor") {
            base.zero_floor = field<double>(doc, "zero_floor");
        } else if (key == "min_cohort") {
            base.min_cohort = field<int>(doc, "min_cohort");
        } else if (key == "max_duration") {
            base.max_duration = field<int>(doc, "max_duration");
        } else if (key == "min_bid_ask_ratio") {
            base.min_bid_ask_ratio = field<double>(doc, "min_bid_ask_ratio");
        } else if (key == "output_format") {
            const auto format = parse_format(field<std::string>(doc, "output_format"));
            if (!format) throw ConfigError("config field 'output_format' must be csv or json");
            base.output_format = *format;
        } else {
            throw ConfigError("unknown config field '" + key + "'");
        }
    }
    return base;
}

Config load_config(const std::filesystem::path& path, Config base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void apply(Config& config, const ConfigOverrides& o) {
    if (o.rate) config.rate = *o.rate;
    if (o.percentile_levels) config.percentile_levels = *o.percentile_levels;
    if (o.dollar_age_tolerance) config.dollar_age_tolerance = *o.dollar_age_tolerance;
    if (o.zero_floor) config.zero_floor = *o.zero_floor;
    if (o.min_cohort) config.min_cohort = *o.min_cohort;
    if (o.max_duration) config.max_duration = *o.max_duration;
    if (o.min_bid_ask_ratio) config.min_bid_ask_ratio = *o.min_bid_ask_ratio;
    if (o.output_format) config.output_format = *o.output_format;
}

void validate(const Config& c) {
    if (!std::isfinite(c.rate) || c.rate < 0.0) throw ConfigError("rate must be >= 0");
    if (c.percentile_levels.empty()) throw ConfigError("percentile_levels must not be empty");
    for (std::size_t k = 0; k < c.percentile_levels.size(); ++k) {
        const double level = c.percentile_levels[k];
        if (!(level > 0.0 && level < 100.0)) throw ConfigError("percentile_levels must lie in (0,100)");
        if (k > 0 && !(level > c.percentile_levels[k - 1])) {
            throw ConfigError("percentile_levels must be strictly increasing");
        }
    }
    if (!std::isfinite(c.dollar_age_tolerance) || c.dollar_age_tolerance < 0.0) {
        throw ConfigError("dollar_age_tolerance must be >= 0");
    }
    if (!std::isfinite(c.zero_floor) || c.zero_floor < 0.0) throw ConfigError("zero_floor must be >= 0");
    if (c.min_cohort < 1) throw ConfigError("min_cohort must be >= 1");
    if (c.max_duration < 1) throw ConfigError("max_duration must be >= 1");
    if (!(c.min_bid_ask_ratio >= 0.0 && c.min_bid_ask_ratio <= 1.0)) {
        throw ConfigError("min_bid_ask_ratio must lie in [0,1]");
    }
}

}  // namespace royalty::cli
