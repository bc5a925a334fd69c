#include "starrad/cli/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "starrad/errors.hpp"

namespace starrad::cli {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ConfigError("csv: no column named '" + std::string(name) + "'");
}

std::string format_real(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 17);
    if (ec != std::errc{}) throw Error("csv: cannot format number");
    return std::string(buf.data(), end);
}

double parse_real(std::string_view text) {
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ConfigError("not a number: '" + std::string(text) + "'");
    return value;
}

long long parse_integer(std::string_view text) {
    long long value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ConfigError("not an integer: '" + std::string(text) + "'");
    return value;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].find_first_of(",\n") != std::string::npos)
                throw Error("csv: cell contains a delimiter: " + cells[i]);
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw Error("csv: ragged row");
        emit(row);
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: missing header row");
    table.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != table.header.size()) throw ConfigError("csv: ragged row: " + line);
        table.rows.push_back(std::move(cells));
    }
    return table;
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_csv(out, table);
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    return read_csv(in);
}

CsvTable trace_table(const std::vector<train::TraceRow>& rows) {
    CsvTable table{{"epoch", "train_loss", "l2_test_error", "seconds"}, {}};
    table.rows.reserve(rows.size());
    for (const auto& r : rows)
        table.rows.push_back({std::to_string(r.epoch), format_real(r.train_loss),
                              format_real(r.l2_test_error), format_real(r.seconds)});
    return table;
}

std::vector<train::TraceRow> trace_rows(const CsvTable& table) {
    const auto epoch = table.column("epoch");
    const auto loss = table.column("train_loss");
    const auto l2 = table.column("l2_test_error");
    const auto secs = table.column("seconds");
    std::vector<train::TraceRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& cells : table.rows)
        rows.push_back({static_cast<int>(parse_integer(cells[epoch])), parse_real(cells[loss]),
                        parse_real(cells[l2]), parse_real(cells[secs])});
    return rows;
}

}  // namespace starrad::cli
