#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace royalty {

/// Malformed input file. `line` is 1-based; 0 means the whole file.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, std::string message);

    [[nodiscard]] const std::string& source() const { return source_; }
    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] const std::string& detail() const { return detail_; }

    /// Returns a copy tagged with a file name, for callers that know it.
    [[nodiscard]] ParseError with_source(std::string source) const;

private:
    std::string source_;
    std::size_t line_;
    std::string detail_;
};

namespace csv {

/// Line-oriented reader for the simple unquoted CSV dialect used by every
/// data file here: comma separated, no quoting, LF or CRLF endings, optional
/// UTF-8 byte order mark, blank lines ignored.
class Reader {
public:
    Reader(std::istream& in, std::string source);

    /// Consumes the header row and checks it matches `expected` exactly.
    void expect_header(std::string_view expected);

    /// Next non-blank row split into fields; nullopt at end of input.
    std::optional<std::vector<std::string>> next();

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] const std::string& source() const { return source_; }

    [[noreturn]] void fail(const std::string& message) const;

private:
    std::optional<std::string> next_line();

    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
};

std::vector<std::string> split(std::string_view line);

double parse_real(std::string_view text);
long long parse_integer(std::string_view text);

/// Fixed-point rendering, e.g. fixed(2.5, 6) == "2.500000".
std::string fixed(double value, int digits);
/// Shortest text that parses back to the identical double.
std::string round_trip(double value);

}  // namespace csv
}  // namespace royalty
