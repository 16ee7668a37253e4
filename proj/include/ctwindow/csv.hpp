#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ctwindow::csv {

using Row = std::vector<std::string>;

/// Quote a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// RFC 4180 style reader (quoted fields, doubled quotes, CRLF tolerated).
/// Blank lines are skipped.
std::vector<Row> read_all(std::istream& in);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

/// Strict number parse; throws FormatError naming `what` on failure.
double parse_number(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

/// Index of `name` in `header`; throws FormatError when absent.
std::size_t column(const Row& header, std::string_view name);

} // namespace ctwindow::csv
