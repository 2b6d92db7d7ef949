#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spvcap::csv {

/// Minimal CSV dialect used by every file this project reads or writes:
/// UTF-8, comma separator, '.' decimal separator, no quoting, first row is
/// the header. Empty cells denote missing values.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or nullopt.
    std::optional<std::size_t> column(std::string_view name) const;
};

Table read_file(const std::string& path);
Table parse(std::string_view text);

void write_file(const std::string& path, const Table& table);
std::string to_string(const Table& table);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parses a full cell as a double. Throws std::invalid_argument on garbage;
/// empty cells are the caller's business (checked before calling).
double parse_double(std::string_view cell, std::size_t line_no, std::string_view column);

long parse_long(std::string_view cell, std::size_t line_no, std::string_view column);

}  // namespace spvcap::csv
