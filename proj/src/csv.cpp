#include "rominv/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace rominv {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    double out = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last)
        throw CsvParseError("not a number: '" + token + "'");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
    series.validate();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "t,value\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << format_double(series.time(i)) << ',' << format_double(series.values[i]) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

TimeSeries read_series_csv(const std::filesystem::path& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw CsvParseError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,value")
        throw CsvParseError(path.string() + ": expected header 't,value', got '" + line + "'");

    std::vector<double> times, values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw CsvParseError(path.string() + ": expected 2 fields, got " +
                                std::to_string(fields.size()));
        times.push_back(parse_double(fields[0]));
        values.push_back(parse_double(fields[1]));
    }
    if (times.empty()) throw CsvParseError(path.string() + ": no data rows");

    TimeSeries series;
    series.t0 = times.front();
    series.dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    series.values = std::move(values);
    series.label = label.empty() ? path.stem().string() : label;
    if (times.size() > 1) {
        if (!(series.dt > 0.0)) throw CsvParseError(path.string() + ": time column not increasing");
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double expected = series.time(i);
            const double tol = 1e-9 * std::max({1.0, std::abs(expected), std::abs(times[i])});
            if (std::abs(times[i] - expected) > tol)
                throw CsvParseError(path.string() + ": time column not uniformly spaced at row " +
                                    std::to_string(i + 2));
        }
    }
    series.validate();
    return series;
}

} // namespace rominv
