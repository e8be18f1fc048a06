#include "royalty/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace royalty {

namespace {

std::string describe(const std::string& source, std::size_t line, const std::string& message) {
    std::string out = source.empty() ? std::string("<input>") : source;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + message;
}

}  // namespace

ParseError::ParseError(std::string source, std::size_t line, std::string message)
    : std::runtime_error(describe(source, line, message)),
      source_(std::move(source)),
      line_(line),
      detail_(std::move(message)) {}

ParseError ParseError::with_source(std::string source) const { return {std::move(source), line_, detail_}; }

namespace csv {

Reader::Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

std::optional<std::string> Reader::next_line() {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (line_ == 1 && text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (!text.empty()) return text;
    }
    return std::nullopt;
}

void Reader::expect_header(std::string_view expected) {
    auto header = next_line();
    if (!header) fail("missing header, expected '" + std::string(expected) + "'");
    if (*header != expected) fail("unexpected header '" + *header + "', expected '" + std::string(expected) + "'");
}

std::optional<std::vector<std::string>> Reader::next() {
    auto text = next_line();
    if (!text) return std::nullopt;
    return split(*text);
}

void Reader::fail(const std::string& message) const { throw ParseError(source_, line_, message); }

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return fields;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_real(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(value)) {
        throw std::invalid_argument("invalid number '" + std::string(text) + "'");
    }
    return value;
}

long long parse_integer(std::string_view text) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("invalid integer '" + std::string(text) + "'");
    }
    return value;
}

std::string fixed(double value, int digits) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, digits);
    if (ec != std::errc()) throw std::out_of_range("value too large to format");
    std::string out(buffer, ptr);
    if (out.starts_with('-') && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

std::string round_trip(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc()) throw std::out_of_range("value too large to format");
    return {buffer, ptr};
}

}  // namespace csv
}  // namespace royalty
