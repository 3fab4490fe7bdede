#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rominv/series.hpp"

namespace rominv {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// Strict full-string parse; throws CsvParseError on anything else.
double parse_double(const std::string& token);

// Series CSV: header "t,value", one row per sample, time in days, value in
// meters, full precision.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);

// Reads a series CSV back. t0/dt are recovered from the time column, which
// must be uniformly spaced (relative tolerance 1e-9). The label defaults to
// the file stem.
TimeSeries read_series_csv(const std::filesystem::path& path, const std::string& label = "");

std::vector<std::string> split_csv_line(const std::string& line);

} // namespace rominv
