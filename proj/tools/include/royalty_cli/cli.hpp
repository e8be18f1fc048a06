#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace royalty::cli {

inline constexpr int kExitOk = 0;
/// Usage, I/O, parse or configuration error.
inline constexpr int kExitError = 1;
/// Ran fine but produced nothing usable (no accepted assets, no cohort, ...).
inline constexpr int kExitEmpty = 2;

/// Runs one `royalty` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1..10", "7" or "1,3,5" -> sorted unique durations >= 1. Empty text means
/// 1..max_duration. Throws std::invalid_argument.
std::vector<int> parse_durations(std::string_view text, int max_duration);

}  // namespace royalty::cli
