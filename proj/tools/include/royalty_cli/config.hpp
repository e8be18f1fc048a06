#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace royalty::cli {

enum class OutputFormat { csv, json };

/// Pipeline settings. Resolution order: command-line flag, then config file,
/// then the defaults below.
struct Config {
    double rate = 0.10;
    std::vector<double> percentile_levels = {10.0, 50.0, 90.0};
    double dollar_age_tolerance = 0.30;
    double zero_floor = 0.0;
    int min_cohort = 5;
    int max_duration = 10;
    double min_bid_ask_ratio = 0.5;
    OutputFormat output_format = OutputFormat::csv;

    friend bool operator==(const Config&, const Config&) = default;
};

/// Values given on the command line; unset fields leave the file/default.
struct ConfigOverrides {
    std::optional<double> rate;
    std::optional<std::vector<double>> percentile_levels;
    std::optional<double> dollar_age_tolerance;
    std::optional<double> zero_floor;
    std::optional<int> min_cohort;
    std::optional<int> max_duration;
    std::optional<double> min_bid_ask_ratio;
    std::optional<OutputFormat> output_format;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat JSON object with exactly the Config field names; unknown keys and
/// wrong types throw ConfigError. Missing keys keep their defaults.
Config parse_config(std::string_view json, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

void apply(Config& config, const ConfigOverrides& overrides);

/// Throws ConfigError when a field is out of range.
void validate(const Config& config);

std::optional<OutputFormat> parse_format(std::string_view text);

}  // namespace royalty::cli
