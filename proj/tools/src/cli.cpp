#include "royalty_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "royalty/csv.hpp"
#include "royalty/curves.hpp"
#include "royalty/ingest.hpp"
#include "royalty/market.hpp"
#include "royalty/model.hpp"
#include "royalty/synth.hpp"
#include "royalty_cli/config.hpp"

namespace royalty::cli {

namespace fs = std::filesystem;

namespace {

/// Failure carrying the exit code it maps to.
class CommandError : public std::runtime_error {
public:
    CommandError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    [[nodiscard]] int code() const { return code_; }

private:
    int code_;
};

struct Options {
    std::optional<std::string> config_path;
    std::optional<std::string> format;
    std::string out_dir = ".";
    ConfigOverrides overrides;

    std::optional<std::string> cashflows;
    std::optional<std::string> assets;
    std::optional<std::string> quotes;
    std::optional<std::string> surface;
    std::optional<std::string> spec;

    std::optional<int> age;
    std::string durations;
    std::optional<double> ltm;
    std::optional<int> duration;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CommandError(kExitError, "cannot open " + path);
    return in;
}

std::string read_text(const std::string& path) {
    auto in = open_input(path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const fs::path& dir, const std::string& name, const std::string& contents) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CommandError(kExitError, "cannot create output directory " + dir.string() + ": " + ec.message());
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandError(kExitError, "cannot write " + path.string());
    out << contents;
    if (!out.flush()) throw CommandError(kExitError, "cannot write " + path.string());
}

Config resolve_config(const Options& options) {
    Config config;
    if (options.config_path) config = load_config(*options.config_path);
    ConfigOverrides overrides = options.overrides;
    if (options.format) overrides.output_format = parse_format(*options.format);
    apply(config, overrides);
    validate(config);
    return config;
}

const std::string& require_path(const std::optional<std::string>& path, const char* flag) {
    if (!path) throw CommandError(kExitError, std::string("missing required option ") + flag);
    return *path;
}

Dataset load_dataset(const Options& options, const Config& config) {
    const auto& cashflows_path = require_path(options.cashflows, "--cashflows");
    const auto& assets_path = require_path(options.assets, "--assets");
    auto cashflows_in = open_input(cashflows_path);
    auto assets_in = open_input(assets_path);
    const auto records = parse_cashflows(cashflows_in, cashflows_path, NegativeAmounts::keep);
    const auto infos = parse_assets(assets_in, assets_path);
    std::vector<RawAsset> raw;
    try {
        raw = group_assets(records, infos);
    } catch (const std::invalid_argument& e) {
        throw CommandError(kExitError, cashflows_path + ": " + e.what());
    }
    return build_dataset(std::move(raw), IngestConfig{config.dollar_age_tolerance, config.zero_floor});
}

SurfaceOptions surface_options(const Config& config, std::vector<double> levels) {
    return SurfaceOptions{std::move(levels), config.max_duration, static_cast<std::size_t>(config.min_cohort)};
}

int require_age(const Options& options) {
    if (!options.age) throw CommandError(kExitError, "missing required option --age");
    if (*options.age < 1) throw CommandError(kExitError, "--age must be >= 1");
    return *options.age;
}

ShareSurface load_surface(const Options& options, const Config& config) {
    if (options.surface) {
        auto in = open_input(*options.surface);
        if (fs::path(*options.surface).extension() == ".json") return parse_surface_json(in, *options.surface);
        return parse_surface_csv(in, *options.surface);
    }
    if (!options.cashflows && !options.assets) {
        throw CommandError(kExitError, "give either --surface or --cashflows/--assets with --age");
    }
    const int age = require_age(options);
    const auto dataset = load_dataset(options, config);
    return build_surface(dataset.assets, age, surface_options(config, config.percentile_levels));
}

std::string level_text(double level) {
    if (level == static_cast<double>(static_cast<long long>(level))) return std::to_string(static_cast<long long>(level));
    return csv::round_trip(level);
}

int cmd_validate(const Options& options, std::ostream& out) {
    const Config config = resolve_config(options);
    const auto dataset = load_dataset(options, config);
    const auto& report = dataset.report;
    write_file(options.out_dir, "report.csv", report_csv(report));
    write_file(options.out_dir, "report_summary.json", report_summary_json(report));
    out << "assets: " << report.entries.size() << ", accepted: " << report.accepted()
        << ", rejected: " << report.rejected() << '\n';
    if (report.accepted() == 0) {
        out << "no asset passed the filters\n";
        return kExitEmpty;
    }
    return kExitOk;
}

int cmd_curves(const Options& options, std::ostream& out) {
    const Config config = resolve_config(options);
    const int age = require_age(options);
    const auto dataset = load_dataset(options, config);
    const auto surface = build_surface(dataset.assets, age, surface_options(config, config.percentile_levels));
    if (surface.empty()) {
        throw CommandError(kExitEmpty, "no cohort at base age " + std::to_string(age) + " reaches min_cohort " +
                                           std::to_string(config.min_cohort) + " at any horizon 1.." +
                                           std::to_string(config.max_duration));
    }
    if (config.output_format == OutputFormat::json) {
        write_file(options.out_dir, "surface.json", surface_json(surface));
    } else {
        write_file(options.out_dir, "surface.csv", surface_csv(surface));
    }
    out << "base age " << age << ": " << surface.contiguous_horizons() << " horizon(s) with cells\n";
    return kExitOk;
}

MultiplierTable table_or_exit(const ShareSurface& surface, double rate, int max_duration) {
    try {
        return multiplier_table(surface, rate, max_duration);
    } catch (const MissingCellError& e) {
        throw CommandError(kExitEmpty, e.what());
    }
}

int cmd_multipliers(const Options& options, std::ostream& out) {
    const Config config = resolve_config(options);
    std::vector<int> durations;
    try {
        durations = parse_durations(options.durations, config.max_duration);
    } catch (const std::invalid_argument& e) {
        throw CommandError(kExitError, std::string("--durations: ") + e.what());
    }
    const auto surface = load_surface(options, config);
    const auto table = table_or_exit(surface, config.rate, durations.back());

    if (config.output_format == OutputFormat::json) {
        auto rows = nlohmann::ordered_json::array();
        for (const int d : durations) {
            for (const double level : table.levels()) {
                rows.push_back({{"duration", d}, {"level", level}, {"multiplier", table.entry(d, level)}});
            }
        }
        const nlohmann::ordered_json doc = {{"base_age", table.base_age()}, {"rate", table.rate()}, {"rows", rows}};
        write_file(options.out_dir, "multipliers.json", doc.dump(2) + "\n");
    } else {
        std::string text = "base_age,duration,level,multiplier\n";
        for (const int d : durations) {
            for (const double level : table.levels()) {
                text += std::to_string(table.base_age()) + ',' + std::to_string(d) + ',' + level_text(level) + ',' +
                        csv::fixed(table.entry(d, level), 6) + '\n';
            }
        }
        write_file(options.out_dir, "multipliers.csv", text);
    }
    out << "wrote " << durations.size() << " duration(s) x " << table.levels().size() << " level(s)\n";
    return kExitOk;
}

int cmd_value(const Options& options, std::ostream& out) {
    const Config config = resolve_config(options);
    if (!options.ltm) throw CommandError(kExitError, "missing required option --ltm");
    if (!(*options.ltm > 0.0)) throw CommandError(kExitError, "--ltm must be > 0");
    const int duration = options.duration.value_or(config.max_duration);
    if (duration < 1) throw CommandError(kExitError, "--duration must be >= 1");

    const auto surface = load_surface(options, config);
    const auto table = table_or_exit(surface, config.rate, duration);

    if (config.output_format == OutputFormat::json) {
        auto bands = nlohmann::ordered_json::array();
        for (const double level : table.levels()) {
            const double m = table.entry(duration, level);
            bands.push_back({{"level", level}, {"multiplier", m}, {"price", price(m, *options.ltm)}});
        }
        const nlohmann::ordered_json doc = {{"base_age", table.base_age()}, {"duration", duration},
                                            {"rate", config.rate},          {"ltm", *options.ltm},
                                            {"bands", bands}};
        out << doc.dump(2) << '\n';
    } else {
        out << "base_age,duration,level,multiplier,price\n";
        for (const double level : table.levels()) {
            const double m = table.entry(duration, level);
            out << table.base_age() << ',' << duration << ',' << level_text(level) << ',' << csv::fixed(m, 6) << ','
                << csv::fixed(price(m, *options.ltm), 2) << '\n';
        }
    }
    return kExitOk;
}

std::vector<double> band_levels(const Config& config) {
    std::set<double> levels(config.percentile_levels.begin(), config.percentile_levels.end());
    levels.insert({10.0, 50.0, 90.0});
    return {levels.begin(), levels.end()};
}

int cmd_compare(const Options& options, std::ostream& out) {
    const Config config = resolve_config(options);
    const auto& quotes_path = require_path(options.quotes, "--quotes");
    auto quotes_in = open_input(quotes_path);
    const auto quotes = parse_quotes(quotes_in, quotes_path);
    if (quotes.empty()) throw CommandError(kExitEmpty, quotes_path + ": no quotes");

    const auto dataset = load_dataset(options, config);
    const auto filtered = filter_quotes(quotes, QuoteFilterOptions{config.max_duration, config.min_bid_ask_ratio});
    const auto surfaces = build_surface_set(dataset.assets, surface_options(config, band_levels(config)));
    const auto result = compare(filtered.accepted, surfaces, config.rate);
    const auto by_duration = aggregate_plot_data(result.rows, PlotAxis::duration);
    const auto by_age = aggregate_plot_data(result.rows, PlotAxis::dollar_age);

    if (config.output_format == OutputFormat::json) {
        write_file(options.out_dir, "comparison.json", comparison_json(result, filtered.rejected, by_duration, by_age));
    } else {
        write_file(options.out_dir, "comparison.csv", comparison_csv(result.rows));
        write_file(options.out_dir, "comparison_errors.csv", comparison_errors_csv(result.errors));
        write_file(options.out_dir, "rejected_quotes.csv", rejected_quotes_csv(filtered.rejected));
        write_file(options.out_dir, "plot_by_duration.csv", plot_csv(by_duration));
        write_file(options.out_dir, "plot_by_dollar_age.csv", plot_csv(by_age));
    }
    out << "quotes: " << quotes.size() << ", rejected: " << filtered.rejected.size()
        << ", compared: " << result.rows.size() << ", errors: " << result.errors.size() << '\n';
    return result.rows.empty() ? kExitEmpty : kExitOk;
}

int cmd_synth(const Options& options, std::ostream& out) {
    const Config config = resolve_config(options);
    const auto& spec_path = require_path(options.spec, "--spec");
    PopulationSpec spec;
    try {
        spec = parse_population_spec(read_text(spec_path));
    } catch (const SpecError& e) {
        throw CommandError(kExitError, spec_path + ": " + e.what());
    }
    if (options.seed) spec.seed = *options.seed;

    const auto raw = gen_population(spec, std::max(options.threads, 1U));
    write_file(options.out_dir, "cashflows.csv", cashflows_csv(raw));
    write_file(options.out_dir, "assets.csv", assets_csv(raw));

    const auto dataset = build_dataset(raw, IngestConfig{config.dollar_age_tolerance, config.zero_floor});
    const auto surfaces = build_surface_set(dataset.assets, surface_options(config, band_levels(config)));
    const QuoteSpec quote_spec = spec.quotes.value_or(QuoteSpec{});
    QuoteGenOptions quote_options;
    quote_options.rate = config.rate;
    quote_options.bid_level = quote_spec.bid_level;
    quote_options.ask_level = quote_spec.ask_level;
    quote_options.noise = quote_spec.noise;
    quote_options.seed = derive_seed(spec.seed, raw.size());
    quote_options.max_duration = config.max_duration;
    const auto quotes = gen_quotes(dataset.assets, surfaces, quote_options);
    write_file(options.out_dir, "quotes.csv", quotes_csv(quotes));

    out << "assets: " << raw.size() << ", quotes: " << quotes.size() << '\n';
    return kExitOk;
}

}  // namespace

std::vector<int> parse_durations(std::string_view text, int max_duration) {
    std::vector<int> out;
    if (text.empty()) {
        for (int d = 1; d <= max_duration; ++d) out.push_back(d);
        return out;
    }
    auto to_int = [](std::string_view part) {
        const auto value = csv::parse_integer(part);
        if (value < 1 || value > 1000) throw std::invalid_argument("durations must lie in 1..1000");
        return static_cast<int>(value);
    };
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const int first = to_int(text.substr(0, dots));
        const int last = to_int(text.substr(dots + 2));
        if (first > last) throw std::invalid_argument("empty duration range");
        for (int d = first; d <= last; ++d) out.push_back(d);
        return out;
    }
    for (const auto& part : csv::split(text)) out.push_back(to_int(part));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Royalty catalog valuation: revenue-share curves, multipliers and market comparison", "royalty"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--config", o.config_path, "Flat JSON config file");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out_dir, "Output directory");
    app.add_option("--rate", o.overrides.rate, "Annual discount rate");
    app.add_option("--levels", o.overrides.percentile_levels, "Percentile levels, comma separated")->delimiter(',');
    app.add_option("--tolerance", o.overrides.dollar_age_tolerance, "Dollar-age tolerance (fraction)");
    app.add_option("--zero-floor", o.overrides.zero_floor, "Annual revenue at or below this rejects an asset");
    app.add_option("--min-cohort", o.overrides.min_cohort, "Minimum cohort size for a surface cell");
    app.add_option("--max-duration", o.overrides.max_duration, "Longest duration / horizon considered");
    app.add_option("--min-bid-ask-ratio", o.overrides.min_bid_ask_ratio, "Drop quotes whose bid is below this x ask");

    auto add_data = [&](CLI::App* cmd) {
        cmd->add_option("--cashflows", o.cashflows, "cashflows.csv");
        cmd->add_option("--assets", o.assets, "assets.csv");
    };

    auto* validate_cmd = app.add_subcommand("validate", "Filter raw data and write the rejection report");
    add_data(validate_cmd);

    auto* curves_cmd = app.add_subcommand("curves", "Percentile revenue-share surface for one base age");
    add_data(curves_cmd);
    curves_cmd->add_option("--age", o.age, "Base age t in years");

    auto* multipliers_cmd = app.add_subcommand("multipliers", "Multiplier table from a surface");
    add_data(multipliers_cmd);
    multipliers_cmd->add_option("--surface", o.surface, "Surface file (.csv or .json)");
    multipliers_cmd->add_option("--age", o.age, "Base age t when building from data");
    multipliers_cmd->add_option("--durations", o.durations, "e.g. 1..10, 5 or 1,3,5");

    auto* value_cmd = app.add_subcommand("value", "Price band for an asset");
    add_data(value_cmd);
    value_cmd->add_option("--surface", o.surface, "Surface file (.csv or .json)");
    value_cmd->add_option("--age", o.age, "Base age t when building from data");
    value_cmd->add_option("--ltm", o.ltm, "Last twelve months revenue");
    value_cmd->add_option("--duration", o.duration, "Contract duration in years");

    auto* compare_cmd = app.add_subcommand("compare", "Compare market quotes with model bands");
    add_data(compare_cmd);
    compare_cmd->add_option("--quotes", o.quotes, "quotes.csv");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--spec", o.spec, "Population spec JSON");
    synth_cmd->add_option("--seed", o.seed, "Override the spec seed");
    synth_cmd->add_option("--threads", o.threads, "Worker threads for generation");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(o, out);
        if (curves_cmd->parsed()) return cmd_curves(o, out);
        if (multipliers_cmd->parsed()) return cmd_multipliers(o, out);
        if (value_cmd->parsed()) return cmd_value(o, out);
        if (compare_cmd->parsed()) return cmd_compare(o, out);
        if (synth_cmd->parsed()) return cmd_synth(o, out);
    } catch (const CommandError& e) {
        err << "error: " << e.what() << '\n';
        return e.code();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace royalty::cli
