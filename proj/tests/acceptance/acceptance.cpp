// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. argv[1] is a scratch directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli_harness.hpp"
#include "oracles.hpp"
#include "royalty/curves.hpp"
#include "royalty/ingest.hpp"
#include "royalty/market.hpp"
#include "royalty/model.hpp"
#include "royalty/synth.hpp"

using namespace royalty;
namespace fs = std::filesystem;

namespace {

class Check {
public:
    void expect(bool ok, const std::string& what) {
        ++total_;
        if (!ok) {
            ++failures_;
            if (notes_.size() < 5) notes_.push_back(what);
        }
    }
    [[nodiscard]] bool ok() const { return failures_ == 0 && total_ > 0; }
    [[nodiscard]] std::string summary() const {
        std::string text = std::to_string(total_ - failures_) + "/" + std::to_string(total_) + " checks";
        for (const auto& note : notes_) text += "; " + note;
        return text;
    }

private:
    int total_ = 0;
    int failures_ = 0;
    std::vector<std::string> notes_;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

PopulationSpec geometric(const std::vector<double>& growths, int count, int age, double sigma = 0.0,
                         double initial = 1e11, std::uint64_t seed = 42) {
    PopulationSpec spec;
    spec.seed = seed;
    for (double g : growths) spec.groups.push_back({count, g, sigma, age, initial});
    return spec;
}

// 1. Flat unit shares reproduce the ordinary annuity.
void annuity(Check& c) {
    const std::vector<double> ones(10, 1.0);
    for (int d = 1; d <= 10; ++d) {
        const double m = multiplier_from_shares(std::span(ones).first(static_cast<std::size_t>(d)), 0.10);
        const double expected = (1.0 - std::pow(1.1, -d)) / 0.1;
        c.expect(oracle::close_rel(m, expected, 1e-12), "d=" + std::to_string(d) + " got " + fmt(m));
    }
    const double m10 = multiplier_from_shares(ones, 0.10);
    c.expect(std::fabs(m10 - 6.14456711) <= 1e-8, "d=10 value " + fmt(m10));
}

// 2. Noise-free geometric populations reproduce the growing annuity.
void growing_annuity(Check& c) {
    const double r = kDefaultDiscountRate;
    for (const double g : {-0.5, -0.2, 0.0, 0.1, r}) {
        const auto dataset = build_dataset(gen_population(geometric({g}, 5, 13)));
        c.expect(dataset.assets.size() == 5, "g=" + fmt(g) + " accepted " + std::to_string(dataset.assets.size()));
        const auto surfaces = build_surface_set(dataset.assets);
        for (const int base : {1, 2}) {
            const auto it = surfaces.find(base);
            if (it == surfaces.end()) {
                c.expect(false, "no surface at age " + std::to_string(base));
                continue;
            }
            const auto table = multiplier_table(it->second, r, 10);
            for (int d = 1; d <= 10; ++d) {
                for (const double p : kDefaultLevels) {
                    const double m = table.entry(d, p);
                    const double cf = closed_form_multiplier(g, r, d);
                    c.expect(oracle::close_rel(m, cf, 1e-9),
                             "g=" + fmt(g) + " d=" + std::to_string(d) + " " + fmt(m) + " vs " + fmt(cf));
                }
            }
        }
    }
    for (int d = 1; d <= 10; ++d) {
        c.expect(closed_form_multiplier(r, r, d) == static_cast<double>(d), "q=1 at d=" + std::to_string(d));
    }
}

// 3. Interpolated percentile against a brute-force oracle.
void percentile_oracle(Check& c) {
    oracle::TestRng rng(20240607);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> values(static_cast<std::size_t>(rng.integer(1, 12)));
        for (auto& v : values) v = rng.uniform(0.0, 10.0);
        for (const double p : {0.0, 10.0, 50.0, 90.0, 100.0}) {
            const double got = percentile(values, p);
            const double want = oracle::percentile(values, p);
            const bool ok = got == want || oracle::close_rel(got, want, 1e-12);
            c.expect(ok, "trial " + std::to_string(trial) + " p=" + fmt(p));
        }
    }
}

// 4. Surface invariants on random synthetic datasets.
void surface_invariants(Check& c) {
    oracle::TestRng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        PopulationSpec spec;
        spec.seed = rng.next();
        const int groups = rng.integer(1, 4);
        for (int k = 0; k < groups; ++k) {
            spec.groups.push_back({rng.integer(2, 8), rng.uniform(-0.4, 0.2), rng.uniform(0.0, 0.5),
                                   rng.integer(3, 16), rng.uniform(100.0, 1e6)});
        }
        const auto dataset = build_dataset(gen_population(spec));
        SurfaceOptions options;
        options.min_cohort = static_cast<std::size_t>(rng.integer(1, 5));
        const auto surfaces = build_surface_set(dataset.assets, options);
        const std::string tag = "trial " + std::to_string(trial);
        for (const auto& [age, surface] : surfaces) {
            for (int i = 1; i < surface.max_horizon(); ++i) {
                c.expect(surface.cohort_size(i + 1) <= surface.cohort_size(i), tag + " cohort growth");
            }
            for (int i = 1; i <= surface.max_horizon(); ++i) {
                if (!surface.has_cells(i)) continue;
                const double s10 = *surface.share(i, 10), s50 = *surface.share(i, 50), s90 = *surface.share(i, 90);
                c.expect(s10 <= s50 && s50 <= s90, tag + " share level order");
            }
            const int horizons = surface.contiguous_horizons();
            if (horizons == 0) continue;
            const auto low = multiplier_table(surface, 0.05, horizons);
            const auto mid = multiplier_table(surface, 0.10, horizons);
            const auto high = multiplier_table(surface, 0.20, horizons);
            for (int d = 1; d <= horizons; ++d) {
                c.expect(mid.entry(d, 10) <= mid.entry(d, 50) && mid.entry(d, 50) <= mid.entry(d, 90),
                         tag + " multiplier level order");
                for (const double p : kDefaultLevels) {
                    if (d > 1) c.expect(mid.entry(d, p) >= mid.entry(d - 1, p), tag + " monotone in d");
                    c.expect(low.entry(d, p) >= mid.entry(d, p) && mid.entry(d, p) >= high.entry(d, p),
                             tag + " antitone in r");
                }
            }
        }
    }
}

// 5. Rejection fixture and rule boundaries.
void filters(Check& c) {
    std::ifstream cashflows(testing::fixture("filter7/cashflows.csv"));
    std::ifstream assets(testing::fixture("filter7/assets.csv"));
    const auto records = parse_cashflows(cashflows, "cashflows.csv", NegativeAmounts::keep);
    const auto dataset = build_dataset(group_assets(records, parse_assets(assets)));
    c.expect(dataset.report.entries.size() == 7, "fixture size");
    c.expect(dataset.report.accepted() == 2, "accepted " + std::to_string(dataset.report.accepted()));
    for (const auto reason : kRejectReasons) {
        c.expect(dataset.report.count(reason) == 1, std::string(to_string(reason)));
    }

    c.expect((filter_dollar_age(2.6, 2.0) == Verdict::accept), "dollar age +30%");
    c.expect((filter_dollar_age(1.4, 2.0) == Verdict::accept), "dollar age -30%");
    c.expect((filter_dollar_age(9.1, 7.0) == Verdict::accept), "dollar age 9.1 vs 7");
    c.expect(!(filter_dollar_age(2.61, 2.0) == Verdict::accept), "dollar age +30.5%");

    const MarketQuote half{"H", 100.0, 250.0, 500.0, 5, 5.0};
    const MarketQuote below{"B", 100.0, 249.0, 500.0, 5, 5.0};
    const MarketQuote ten{"T", 100.0, std::nullopt, 500.0, 10, 5.0};
    const MarketQuote eleven{"E", 100.0, std::nullopt, 500.0, 11, 5.0};
    const std::vector<MarketQuote> quotes{half, below, ten, eleven};
    const auto filtered = filter_quotes(quotes);
    c.expect(filtered.accepted == std::vector<MarketQuote>{half, ten}, "quote boundaries");
    c.expect(filtered.rejected.size() == 2 && filtered.rejected[0].reason == QuoteRejectReason::bid_too_low &&
                 filtered.rejected[1].reason == QuoteRejectReason::duration_too_long,
             "quote reject reasons");
}

// 6. Sign structure of the share curves.
void share_curve_signs(Check& c) {
    {
        const auto spec = geometric({-0.35, -0.2, -0.1}, 8, 12, 0.02, 50000.0, 7);
        const auto dataset = build_dataset(gen_population(spec));
        const auto surface = build_surface(dataset.assets, 1);
        c.expect(surface.contiguous_horizons() == 10, "young population horizons");
        for (int i = 1; i <= surface.contiguous_horizons(); ++i) {
            for (const double p : kDefaultLevels) {
                const double now = *surface.share(i, p);
                const double before = i == 1 ? 1.0 : *surface.share(i - 1, p);
                c.expect(now < before, "level " + fmt(p) + " not decaying at i=" + std::to_string(i));
            }
        }
    }
    {
        PopulationSpec spec;
        spec.seed = 99;
        spec.groups = {{6, -0.3, 0.02, 18, 40000.0},
                       {6, -0.1, 0.02, 18, 40000.0},
                       {4, 0.0, 0.02, 18, 40000.0},
                       {4, 0.1, 0.02, 18, 40000.0}};
        const auto dataset = build_dataset(gen_population(spec));
        const auto surface = build_surface(dataset.assets, 7);
        c.expect(surface.contiguous_horizons() == 10, "mixed population horizons");
        for (int i = 1; i <= surface.contiguous_horizons(); ++i) {
            const double before10 = i == 1 ? 1.0 : *surface.share(i - 1, 10);
            const double before90 = i == 1 ? 1.0 : *surface.share(i - 1, 90);
            c.expect(*surface.share(i, 10) < before10, "level 10 not decaying at i=" + std::to_string(i));
            c.expect(*surface.share(i, 90) > before90, "level 90 not growing at i=" + std::to_string(i));
        }
    }
}

// 7. Noisy synthetic quotes sit near the model band.
void quote_gaps(Check& c) {
    PopulationSpec spec;
    spec.seed = 314;
    for (int age = 4; age <= 24; age += 2) {
        spec.groups.push_back({12, -0.25, 0.15, age, 80000.0});
        spec.groups.push_back({12, -0.1, 0.15, age, 80000.0});
        spec.groups.push_back({8, 0.0, 0.15, age, 80000.0});
        spec.groups.push_back({4, 0.08, 0.15, age, 80000.0});
    }
    const auto dataset = build_dataset(gen_population(spec));
    const auto surfaces = build_surface_set(dataset.assets);
    QuoteGenOptions options;
    options.seed = 2718;
    options.noise = 0.05;
    const auto quotes = gen_quotes(dataset.assets, surfaces, options);
    const auto result = compare(filter_quotes(quotes).accepted, surfaces, options.rate);
    c.expect(result.errors.empty(), std::to_string(result.errors.size()) + " comparison errors");
    c.expect(result.rows.size() > 100, "compared rows " + std::to_string(result.rows.size()));
    const auto plot = aggregate_plot_data(result.rows, PlotAxis::duration);
    c.expect(plot.size() == 10, "duration groups " + std::to_string(plot.size()));
    for (const auto& row : plot) {
        const std::string tag = "duration " + std::to_string(row.axis_value);
        c.expect(row.mean_abs_bid_gap_to_m10.has_value() && *row.mean_abs_bid_gap_to_m10 < 0.15,
                 tag + " bid gap " + fmt(row.mean_abs_bid_gap_to_m10.value_or(-1)));
        c.expect(row.mean_abs_ask_gap_to_m50 < 0.15, tag + " ask gap " + fmt(row.mean_abs_ask_gap_to_m50));
    }
}

// 8. Byte-identical CLI outputs.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = testing::slurp(entry.path());
    }
    return files;
}

void determinism(Check& c, const fs::path& root) {
    const auto spec_path = root / "spec.json";
    testing::spit(spec_path, R"({"seed": 8675309, "groups": [
      {"count": 40, "annual_growth": -0.2, "noise_sigma": 0.3, "age_years": 15, "initial_revenue": 90000},
      {"count": 40, "annual_growth": 0.0, "noise_sigma": 0.3, "age_years": 11, "initial_revenue": 90000},
      {"count": 20, "annual_growth": 0.1, "noise_sigma": 0.3, "age_years": 8, "initial_revenue": 90000}],
      "quotes": {"bid_level": 10, "ask_level": 50, "noise": 0.05}})");

    std::vector<std::map<std::string, std::string>> synths;
    for (const std::string threads : {"1", "1", "2", "7"}) {
        const auto dir = root / ("synth_" + std::to_string(synths.size()));
        const auto r = testing::run_cli(
            {"synth", "--spec", spec_path.string(), "--threads", threads, "--out", dir.string()});
        c.expect(r.code == 0, "synth exit " + std::to_string(r.code) + " " + r.err);
        synths.push_back(snapshot(dir));
    }
    c.expect(synths[0].size() == 3, "synth wrote " + std::to_string(synths[0].size()) + " files");
    for (std::size_t k = 1; k < synths.size(); ++k) c.expect(synths[k] == synths[0], "synth run " + std::to_string(k));

    const auto data = root / "synth_0";
    const std::vector<std::string> inputs = {"--cashflows", (data / "cashflows.csv").string(), "--assets",
                                             (data / "assets.csv").string()};
    const auto surface = (data / "surface_src").string();
    testing::run_cli([&] {
        auto a = std::vector<std::string>{"curves", "--age", "3", "--out", surface};
        a.insert(a.end(), inputs.begin(), inputs.end());
        return a;
    }());

    const std::vector<std::vector<std::string>> commands = {
        {"validate"},
        {"curves", "--age", "3"},
        {"curves", "--age", "3", "--format", "json", "--levels", "5,25,50,75,95"},
        {"multipliers", "--age", "2", "--durations", "1..6"},
        {"multipliers", "--surface", surface + "/surface.csv", "--format", "json", "--rate", "0.07"},
        {"value", "--surface", surface + "/surface.csv", "--ltm", "12345.67", "--duration", "5"},
        {"value", "--age", "3", "--ltm", "999", "--duration", "4", "--format", "json"},
        {"compare", "--quotes", (data / "quotes.csv").string()},
        {"compare", "--quotes", (data / "quotes.csv").string(), "--format", "json"},
    };
    for (std::size_t k = 0; k < commands.size(); ++k) {
        std::vector<std::map<std::string, std::string>> runs;
        std::vector<testing::CliResult> results;
        for (int rep = 0; rep < 2; ++rep) {
            const auto dir = root / ("cmd" + std::to_string(k) + "_" + std::to_string(rep));
            fs::create_directories(dir);
            auto args = commands[k];
            args.insert(args.end(), inputs.begin(), inputs.end());
            args.insert(args.end(), {"--out", dir.string()});
            results.push_back(testing::run_cli(args));
            runs.push_back(snapshot(dir));
        }
        const std::string tag = commands[k].front() + " #" + std::to_string(k);
        c.expect(results[0].code == 0, tag + " exit " + std::to_string(results[0].code) + " " + results[0].err);
        c.expect(!runs[0].empty() || !results[0].out.empty(), tag + " produced nothing");
        c.expect(runs[0] == runs[1], tag + " files differ");
        c.expect(results[0].out == results[1].out && results[0].code == results[1].code, tag + " stdout differs");
    }
}

// 9. Annualization conserves covered revenue to the cent.
void conservation(Check& c) {
    oracle::TestRng rng(909);
    for (int k = 0; k < 100; ++k) {
        const std::string id = "C" + std::to_string(k);
        const int years = rng.integer(1, 8);
        const int tail = rng.integer(0, 1) ? rng.integer(1, 11) : 0;
        std::vector<CashflowRecord> records;
        int index = YearMonth{2012, rng.integer(1, 12)}.index();
        const int cutoff = index + years * 12;
        std::int64_t covered = 0;
        while (index < cutoff + tail) {
            const bool quarterly = index + 3 <= cutoff && (cutoff - index) % 3 == 0 && rng.integer(0, 1) == 1;
            const int months = quarterly ? 3 : 1;
            const Cents amount(static_cast<std::int64_t>(rng.next() % 10'000'000'000ULL) + 1);
            records.push_back({id, YearMonth::from_index(index), months, amount});
            if (index < cutoff) covered += amount.hundredths();
            index += months;
        }
        const auto annual = annualize(records);
        std::int64_t total = 0;
        for (const Cents a : annual) total += a.hundredths();
        c.expect(annual.size() == static_cast<std::size_t>(years), id + " bucket count");
        c.expect(total == covered, id + " total " + std::to_string(total) + " vs " + std::to_string(covered));
    }
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "royalty_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"annuity oracle", annuity},
        {"growing annuity oracle", growing_annuity},
        {"percentile oracle", percentile_oracle},
        {"surface invariants", surface_invariants},
        {"filter fixtures and boundaries", filters},
        {"share curve signs", share_curve_signs},
        {"quote gaps near model band", quote_gaps},
        {"determinism", [&](Check& c) { determinism(c, root); }},
        {"annualization conservation", conservation},
    };

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[k].second(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        if (!check.ok()) ++failed;
        std::printf("%s criterion %zu (%s): %s [%lld ms]\n", check.ok() ? "PASS" : "FAIL", k + 1,
                    criteria[k].first.c_str(), check.summary().c_str(), static_cast<long long>(ms));
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
