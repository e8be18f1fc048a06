#include "royalty/curves.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "royalty/csv.hpp"

namespace royalty {

std::optional<double> observed_share(const Asset& asset, int base_age, int horizon) {
    if (base_age < 1 || horizon < 1) return std::nullopt;
    const int target = base_age + horizon;
    if (asset.dollar_age < static_cast<double>(target)) return std::nullopt;
    if (!asset.series.has_age(base_age) || !asset.series.has_age(target)) return std::nullopt;
    return asset.series.at_age(target) / asset.series.at_age(base_age);
}

double percentile_sorted(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw std::domain_error("percentile of an empty set");
    if (!(level >= 0.0 && level <= 100.0)) throw std::domain_error("percentile level outside [0,100]");

    const double position = static_cast<double>(sorted.size() - 1) * level / 100.0;
    const auto lower = static_cast<std::size_t>(std::floor(position));
    if (lower + 1 >= sorted.size()) return sorted.back();
    const double fraction = position - static_cast<double>(lower);
    const double lo = sorted[lower];
    const double hi = sorted[lower + 1];
    // Clamp guards the ordering of adjacent levels against rounding in hi - lo.
    return std::clamp(lo + fraction * (hi - lo), lo, hi);
}

double percentile(std::span<const double> values, double level) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return percentile_sorted(sorted, level);
}

Cohort build_cohort(std::span<const Asset> dataset, int base_age, int horizon) {
    std::vector<std::pair<std::string, double>> members;
    for (const auto& asset : dataset) {
        if (const auto share = observed_share(asset, base_age, horizon)) members.emplace_back(asset.asset_id(), *share);
    }
    std::sort(members.begin(), members.end());

    Cohort cohort{base_age, horizon, {}, {}};
    cohort.shares.reserve(members.size());
    cohort.member_ids.reserve(members.size());
    for (auto& [id, share] : members) {
        cohort.member_ids.push_back(std::move(id));
        cohort.shares.push_back(share);
    }
    return cohort;
}

ShareSurface build_surface(std::span<const Asset> dataset, int base_age, const SurfaceOptions& options) {
    if (options.max_horizon < 1) throw std::domain_error("max horizon must be >= 1");
    if (options.min_cohort < 1) throw std::domain_error("min cohort must be >= 1");

    ShareSurface surface(base_age, options.levels);
    for (int horizon = 1; horizon <= options.max_horizon; ++horizon) {
        auto cohort = build_cohort(dataset, base_age, horizon);
        const std::size_t n = cohort.shares.size();
        if (n < options.min_cohort) {
            surface.add_horizon(n, std::nullopt);
            continue;
        }
        std::sort(cohort.shares.begin(), cohort.shares.end());
        std::vector<double> cells;
        cells.reserve(options.levels.size());
        for (const double level : options.levels) cells.push_back(percentile_sorted(cohort.shares, level));
        surface.add_horizon(n, std::move(cells));
    }
    return surface;
}

SurfaceSet build_surface_set(std::span<const Asset> dataset, const SurfaceOptions& options) {
    double oldest = 0.0;
    for (const auto& asset : dataset) oldest = std::max(oldest, asset.dollar_age);
    SurfaceSet surfaces;
    for (int age = 1; static_cast<double>(age + 1) <= oldest; ++age) {
        auto surface = build_surface(dataset, age, options);
        if (!surface.empty()) surfaces.emplace(age, std::move(surface));
    }
    return surfaces;
}

namespace {

std::string level_field(double level) {
    // Levels are almost always integral; print them that way.
    if (level == std::floor(level)) return std::to_string(static_cast<long long>(level));
    return csv::round_trip(level);
}

struct SurfaceRow {
    int horizon;
    double level;
    std::optional<double> share;
    std::size_t cohort_size;
};

ShareSurface assemble(int base_age, std::vector<SurfaceRow> rows, const std::string& source) {
    std::vector<double> levels;
    for (const auto& row : rows) {
        if (std::find(levels.begin(), levels.end(), row.level) == levels.end()) levels.push_back(row.level);
    }
    std::sort(levels.begin(), levels.end());
    std::map<int, std::vector<const SurfaceRow*>> by_horizon;
    for (const auto& row : rows) by_horizon[row.horizon].push_back(&row);

    try {
        ShareSurface surface(base_age, levels);
        int expected = 1;
        for (const auto& [horizon, members] : by_horizon) {
            if (horizon != expected++) throw ParseError(source, 0, "horizons must run 1, 2, ... without gaps");
            const std::size_t cohort = members.front()->cohort_size;
            std::vector<double> cells(levels.size());
            std::size_t present = 0;
            std::vector<bool> filled(levels.size(), false);
            for (const auto* row : members) {
                if (row->cohort_size != cohort) {
                    throw ParseError(source, 0, "inconsistent cohort_size at horizon " + std::to_string(horizon));
                }
                const auto idx = static_cast<std::size_t>(
                    std::find(levels.begin(), levels.end(), row->level) - levels.begin());
                if (filled[idx]) throw ParseError(source, 0, "duplicate cell at horizon " + std::to_string(horizon));
                filled[idx] = true;
                if (row->share) {
                    cells[idx] = *row->share;
                    ++present;
                }
            }
            if (present != 0 && present != levels.size()) {
                throw ParseError(source, 0, "horizon " + std::to_string(horizon) + " has shares for only some levels");
            }
            surface.add_horizon(cohort, present == 0 ? std::nullopt : std::optional(std::move(cells)));
        }
        return surface;
    } catch (const std::domain_error& e) {
        throw ParseError(source, 0, e.what());
    }
}

}  // namespace

std::string surface_csv(const ShareSurface& surface) {
    std::string out(kSurfaceHeader);
    out += '\n';
    for (int horizon = 1; horizon <= surface.max_horizon(); ++horizon) {
        for (const double level : surface.levels()) {
            const auto share = surface.share(horizon, level);
            out += std::to_string(surface.base_age()) + ',' + std::to_string(horizon) + ',' + level_field(level) + ',' +
                   (share ? csv::fixed(*share, 6) : std::string()) + ',' +
                   std::to_string(surface.cohort_size(horizon)) + '\n';
        }
    }
    return out;
}

std::string surface_json(const ShareSurface& surface) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int horizon = 1; horizon <= surface.max_horizon(); ++horizon) {
        for (const double level : surface.levels()) {
            const auto share = surface.share(horizon, level);
            rows.push_back({{"horizon", horizon},
                            {"level", level},
                            {"share", share ? nlohmann::ordered_json(*share) : nlohmann::ordered_json(nullptr)},
                            {"cohort_size", surface.cohort_size(horizon)}});
        }
    }
    nlohmann::ordered_json doc = {
        {"base_age", surface.base_age()},
        {"levels", std::vector<double>(surface.levels().begin(), surface.levels().end())},
        {"rows", rows},
    };
    return doc.dump(2) + "\n";
}

ShareSurface parse_surface_csv(std::istream& in, const std::string& source) {
    csv::Reader reader(in, source);
    reader.expect_header(kSurfaceHeader);
    std::optional<int> base_age;
    std::vector<SurfaceRow> rows;
    while (auto fields = reader.next()) {
        if (fields->size() != 5) reader.fail("expected 5 fields, got " + std::to_string(fields->size()));
        try {
            const auto age = static_cast<int>(csv::parse_integer((*fields)[0]));
            if (base_age && *base_age != age) reader.fail("surface file mixes base ages");
            base_age = age;
            SurfaceRow row{static_cast<int>(csv::parse_integer((*fields)[1])), csv::parse_real((*fields)[2]),
                           std::nullopt, 0};
            if ((*fields)[3].empty()) {
                row.share = std::nullopt;
            } else {
                row.share = csv::parse_real((*fields)[3]);
            }
            const auto cohort = csv::parse_integer((*fields)[4]);
            if (cohort < 0) reader.fail("negative cohort_size");
            row.cohort_size = static_cast<std::size_t>(cohort);
            rows.push_back(row);
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
    }
    if (!base_age) throw ParseError(source, 0, "surface file has no rows");
    return assemble(*base_age, std::move(rows), source);
}

ShareSurface parse_surface_json(std::istream& in, const std::string& source) {
    try {
        const auto doc = nlohmann::json::parse(in);
        std::vector<SurfaceRow> rows;
        for (const auto& item : doc.at("rows")) {
            SurfaceRow row{item.at("horizon").get<int>(), item.at("level").get<double>(), std::nullopt,
                           item.at("cohort_size").get<std::size_t>()};
            if (!item.at("share").is_null()) row.share = item.at("share").get<double>();
            rows.push_back(row);
        }
        if (rows.empty()) throw ParseError(source, 0, "surface file has no rows");
        return assemble(doc.at("base_age").get<int>(), std::move(rows), source);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 0, e.what());
    }
}

}  // namespace royalty
