#include "spvcap/csv.hpp"

#include "spvcap/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace spvcap::csv {

std::optional<std::size_t> Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

}  // namespace

Table parse(std::string_view text) {
    Table table;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        if (line.empty() && pos >= text.size()) break;  // trailing newline
        if (first) {
            table.header = split_line(line);
            first = false;
        } else {
            auto cells = split_line(line);
            if (cells.size() != table.header.size()) {
                throw std::runtime_error("csv: line " + std::to_string(table.rows.size() + 2) +
                                         " has " + std::to_string(cells.size()) +
                                         " cells, expected " + std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string to_string(const Table& table) {
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    append_row(table.header);
    for (const auto& row : table.rows) append_row(row);
    return out;
}

void write_file(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_string(table);
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view cell, std::size_t line_no, std::string_view column) {
    double value = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw std::runtime_error("csv: line " + std::to_string(line_no) + ", column '" +
                                 std::string(column) + "': cannot parse '" + std::string(cell) +
                                 "' as a number");
    }
    return value;
}

long parse_long(std::string_view cell, std::size_t line_no, std::string_view column) {
    long value = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw std::runtime_error("csv: line " + std::to_string(line_no) + ", column '" +
                                 std::string(column) + "': cannot parse '" + std::string(cell) +
                                 "' as an integer");
    }
    return value;
}

}  // namespace spvcap::csv
