#pragma once

// Comma-separated tables with a header row. Reals are written with 17
// significant digits so that every double survives a write/read cycle.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "starrad/training.hpp"

namespace starrad::cli {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws ConfigError if absent
};

std::string format_real(double value);
double parse_real(std::string_view text);
long long parse_integer(std::string_view text);

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv_file(const std::filesystem::path& path);

/// epoch, train_loss, l2_test_error, seconds
CsvTable trace_table(const std::vector<train::TraceRow>& rows);
std::vector<train::TraceRow> trace_rows(const CsvTable& table);

}  // namespace starrad::cli
