#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "royalty/model.hpp"

namespace royalty {

inline constexpr int kDefaultMinCohort = 5;
inline const std::vector<double> kDefaultLevels = {10.0, 50.0, 90.0};

/// Observed revenue shares C(t+i)/C(t) of every asset qualifying at (t, i).
struct Cohort {
    int base_age = 0;
    int horizon = 0;
    std::vector<double> shares;           // parallel to member_ids
    std::vector<std::string> member_ids;  // sorted
};

/// C(t+i)/C(t) when the asset's dollar age is at least t+i and both annual
/// buckets exist; nullopt otherwise.
std::optional<double> observed_share(const Asset& asset, int base_age, int horizon);

/// Linear interpolation between closest ranks at position (n-1)*level/100 of
/// the sorted values. Throws std::domain_error for empty input or a level
/// outside [0,100].
double percentile(std::span<const double> values, double level);

/// Percentile of values that are already sorted ascending.
double percentile_sorted(std::span<const double> sorted, double level);

Cohort build_cohort(std::span<const Asset> dataset, int base_age, int horizon);

struct SurfaceOptions {
    std::vector<double> levels = kDefaultLevels;
    int max_horizon = kDefaultMaxDuration;
    std::size_t min_cohort = kDefaultMinCohort;
};

/// Percentile shares for horizons 1..max_horizon. Cohort sizes are recorded
/// for every horizon; cells exist only where the cohort reaches min_cohort.
ShareSurface build_surface(std::span<const Asset> dataset, int base_age, const SurfaceOptions& options = {});

/// Surfaces keyed by base age.
using SurfaceSet = std::map<int, ShareSurface>;

/// Surfaces for every base age from 1 up to the oldest dollar age that still
/// leaves a horizon, keeping only those with at least one cell.
SurfaceSet build_surface_set(std::span<const Asset> dataset, const SurfaceOptions& options = {});

inline constexpr std::string_view kSurfaceHeader = "base_age,horizon,level,share,cohort_size";

/// One row per (horizon, level) in canonical order, shares with six fractional
/// digits. Horizons below the cohort threshold keep their rows with an empty
/// share field so that cohort sizes survive the round trip.
std::string surface_csv(const ShareSurface& surface);
/// Same fields at full precision:
/// {"base_age", "levels", "rows": [{"horizon", "level", "share"|null, "cohort_size"}]}
std::string surface_json(const ShareSurface& surface);

/// Reads either serialization back. Throws ParseError.
ShareSurface parse_surface_csv(std::istream& in, const std::string& source = "surface.csv");
ShareSurface parse_surface_json(std::istream& in, const std::string& source = "surface.json");

}  // namespace royalty
