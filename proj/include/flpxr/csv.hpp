#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flpxr::csv {

// Splits one CSV line into fields. Handles RFC-4180 style double quotes
// ("" inside a quoted field escapes a quote); does not handle embedded
// newlines. Fields are appended to `out` (cleared first).
void split_line(std::string_view line, std::vector<std::string>& out);

// Locale-independent numeric parsing; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Quotes a field if it contains a comma, quote or newline.
std::string quote_field(std::string_view s);

}  // namespace flpxr::csv
