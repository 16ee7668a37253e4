#include "ctwindow/csv.hpp"

#include "ctwindow/error.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace ctwindow::csv {

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << escape(row[i]);
    }
    out << '\n';
}

std::vector<Row> read_all(std::istream& in) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    char c = 0;

    auto end_row = [&] {
        if (field_started || !row.empty()) {
            row.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
    };

    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            quoted = true;
            field_started = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            end_row();
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (quoted) {
        throw FormatError("unterminated quoted CSV field");
    }
    end_row();
    return rows;
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "NA";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw FormatError("invalid number '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
    long long value = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw FormatError("invalid integer '" + std::string(text) + "' for " + std::string(what));
    }
    return value;
}

std::size_t column(const Row& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw FormatError("CSV is missing column '" + std::string(name) + "'");
}

} // namespace ctwindow::csv
