#include "rominv/vtk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rominv/csv.hpp"

namespace rominv {

namespace {

// Whitespace tokenizer over the body of the file (everything after the two
// line-oriented header lines).
class TokenStream {
public:
    explicit TokenStream(std::string_view text) : text_(text) {}

    bool next(std::string_view& token) {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) return false;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        token = text_.substr(start, pos_ - start);
        return true;
    }

    std::string_view expect(const char* what) {
        std::string_view token;
        if (!next(token))
            throw TruncatedSectionError(std::string("vtk: unexpected end of file, expected ") +
                                        what);
        return token;
    }

    double expect_number(const char* section) {
        const std::string_view token = expect("a number");
        double v = 0.0;
        auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec != std::errc() || res.ptr != token.data() + token.size())
            throw TruncatedSectionError(std::string("vtk: malformed number '") +
                                        std::string(token) + "' in " + section);
        return v;
    }

    std::size_t expect_count(const char* section) {
        const double v = expect_number(section);
        if (!(v >= 0.0) || v != std::floor(v))
            throw TruncatedSectionError(std::string("vtk: bad count in ") + section);
        return static_cast<std::size_t>(v);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string_view take_line(std::string_view& rest) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

// Relative tolerance with a unit floor; coordinates originate from text so
// exact matches are the common case.
bool coord_match(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

const std::vector<Grid::Vec3>* Grid::find_vectors(std::string_view name) const {
    for (const auto& [array_name, data] : vectors)
        if (array_name == name) return &data;
    return nullptr;
}

Grid parse_legacy_vtk(std::string_view text) {
    std::string_view rest = text;
    const std::string_view magic = take_line(rest);
    if (!magic.starts_with("# vtk DataFile Version"))
        throw BadMagicError("vtk: missing '# vtk DataFile Version' magic line");
    take_line(rest); // free-form title

    TokenStream tokens(rest);
    const std::string_view format = tokens.expect("ASCII or BINARY");
    if (format == "BINARY") throw BinaryUnsupportedError("vtk: BINARY files are not supported");
    if (format != "ASCII")
        throw BadMagicError("vtk: unrecognized format marker '" + std::string(format) + "'");

    if (tokens.expect("DATASET") != "DATASET")
        throw TruncatedSectionError("vtk: expected DATASET line");
    const std::string_view dataset = tokens.expect("a dataset type");
    if (dataset != "UNSTRUCTURED_GRID")
        throw UnknownDatasetError("vtk: unsupported dataset '" + std::string(dataset) + "'");

    Grid grid;
    std::size_t point_data_count = 0;
    bool have_point_data = false;

    std::string_view keyword;
    while (tokens.next(keyword)) {
        if (keyword == "POINTS") {
            const std::size_t n = tokens.expect_count("POINTS");
            tokens.expect("a point data type");
            grid.points.resize(n);
            for (auto& p : grid.points)
                for (double& c : p) c = tokens.expect_number("POINTS");
        } else if (keyword == "CELLS") {
            tokens.expect_count("CELLS");
            const std::size_t total = tokens.expect_count("CELLS");
            for (std::size_t i = 0; i < total; ++i) tokens.expect_number("CELLS");
        } else if (keyword == "CELL_TYPES") {
            const std::size_t n = tokens.expect_count("CELL_TYPES");
            for (std::size_t i = 0; i < n; ++i) tokens.expect_number("CELL_TYPES");
        } else if (keyword == "POINT_DATA") {
            point_data_count = tokens.expect_count("POINT_DATA");
            if (point_data_count != grid.points.size())
                throw TruncatedSectionError("vtk: POINT_DATA count " +
                                            std::to_string(point_data_count) +
                                            " does not match point count " +
                                            std::to_string(grid.points.size()));
            have_point_data = true;
        } else if (keyword == "VECTORS") {
            if (!have_point_data)
                throw TruncatedSectionError("vtk: VECTORS section before POINT_DATA");
            const std::string name(tokens.expect("a vector array name"));
            tokens.expect("a vector data type");
            std::vector<Grid::Vec3> data(point_data_count);
            for (auto& tuple : data)
                for (double& c : tuple) c = tokens.expect_number("VECTORS");
            grid.vectors.emplace_back(name, std::move(data));
        } else if (keyword == "SCALARS") {
            if (!have_point_data)
                throw TruncatedSectionError("vtk: SCALARS section before POINT_DATA");
            tokens.expect("a scalar array name");
            tokens.expect("a scalar data type");
            // Optional component count, then a LOOKUP_TABLE line.
            std::string_view tok = tokens.expect("LOOKUP_TABLE");
            std::size_t components = 1;
            if (tok != "LOOKUP_TABLE") {
                double v = 0.0;
                auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 1)
                    throw TruncatedSectionError("vtk: malformed SCALARS header");
                components = static_cast<std::size_t>(v);
                tok = tokens.expect("LOOKUP_TABLE");
                if (tok != "LOOKUP_TABLE")
                    throw TruncatedSectionError("vtk: expected LOOKUP_TABLE after SCALARS");
            }
            tokens.expect("a lookup table name");
            for (std::size_t i = 0; i < point_data_count * components; ++i)
                tokens.expect_number("SCALARS");
        } else {
            throw TruncatedSectionError("vtk: unexpected token '" + std::string(keyword) +
                                        "' where a section keyword was expected");
        }
    }

    if (grid.points.empty()) throw TruncatedSectionError("vtk: no POINTS section");
    return grid;
}

std::string write_legacy_vtk(const Grid& grid, const std::string& title) {
    std::ostringstream out;
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << grid.points.size() << " double\n";
    for (const auto& p : grid.points)
        out << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2])
            << '\n';
    out << "POINT_DATA " << grid.points.size() << '\n';
    for (const auto& [name, data] : grid.vectors) {
        out << "VECTORS " << name << " double\n";
        for (const auto& t : data)
            out << format_double(t[0]) << ' ' << format_double(t[1]) << ' ' << format_double(t[2])
                << '\n';
    }
    return out.str();
}

SurfacePick surface_displacement(const Grid& grid, std::string_view vector_name) {
    const auto* data = grid.find_vectors(vector_name);
    if (!data)
        throw NoSuchArrayError("vtk: no vector array named '" + std::string(vector_name) + "'");
    if (grid.points.empty()) throw NoMatchingPointError("vtk: grid has no points");

    double min_x = grid.points[0][0];
    double max_y = grid.points[0][1];
    for (const auto& p : grid.points) {
        min_x = std::min(min_x, p[0]);
        max_y = std::max(max_y, p[1]);
    }

    SurfacePick pick{0.0, 0, 0};
    bool found = false;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        if (!coord_match(grid.points[i][0], min_x) || !coord_match(grid.points[i][1], max_y))
            continue;
        if (!found) {
            found = true;
            pick.index = i;
            const auto& t = (*data)[i];
            pick.magnitude = std::sqrt(t[0] * t[0] + t[1] * t[1]);
        } else {
            ++pick.tie_count;
        }
    }
    if (!found)
        throw NoMatchingPointError("vtk: no point at (min x, max y) within tolerance");
    return pick;
}

void SnapshotSet::validate() const {
    if (entries.empty()) throw ConfigError("snapshot set: empty");
    if (vector_name.empty()) throw ConfigError("snapshot set: vector name required");
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (!(entries[i].first > entries[i - 1].first))
            throw ConfigError("snapshot set: time stamps must be strictly increasing");
}

TimeSeries build_series(const SnapshotSet& snapshots) {
    snapshots.validate();

    TimeSeries series;
    series.t0 = snapshots.entries.front().first;
    series.dt =
        snapshots.entries.size() > 1
            ? snapshots.entries[1].first - snapshots.entries[0].first
            : 1.0;
    for (std::size_t i = 0; i < snapshots.entries.size(); ++i) {
        const double expected = series.time(i);
        const double actual = snapshots.entries[i].first;
        if (std::abs(actual - expected) > 1e-9 * std::max({1.0, std::abs(actual), expected}))
            throw ConfigError("snapshot set: time stamps not uniformly spaced");
    }

    std::size_t picked_index = 0;
    Grid::Vec3 picked_point{};
    for (std::size_t i = 0; i < snapshots.entries.size(); ++i) {
        const auto& [time, path] = snapshots.entries[i];
        const Grid grid = parse_legacy_vtk(read_text_file(path));
        const SurfacePick pick = surface_displacement(grid, snapshots.vector_name);
        const Grid::Vec3& point = grid.points[pick.index];
        if (i == 0) {
            picked_index = pick.index;
            picked_point = point;
        } else if (pick.index != picked_index || !coord_match(point[0], picked_point[0]) ||
                   !coord_match(point[1], picked_point[1]) ||
                   !coord_match(point[2], picked_point[2])) {
            throw InconsistentSurfacePointError("vtk: snapshot " + path.string() +
                                                " selects a different surface point");
        }
        series.values.push_back(pick.magnitude);
    }
    series.label = "vtk " + snapshots.vector_name;
    return series;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return buf.str();
}

std::vector<std::filesystem::path> list_vtk_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw IoError("not a directory: " + dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".vtk")
            files.push_back(entry.path());
    }

    // Natural order: split stems into text/number runs and compare runs.
    auto natural_less = [](const std::filesystem::path& a, const std::filesystem::path& b) {
        const std::string sa = a.filename().string();
        const std::string sb = b.filename().string();
        std::size_t i = 0, j = 0;
        while (i < sa.size() && j < sb.size()) {
            if (std::isdigit(static_cast<unsigned char>(sa[i])) &&
                std::isdigit(static_cast<unsigned char>(sb[j]))) {
                std::size_t i2 = i, j2 = j;
                while (i2 < sa.size() && std::isdigit(static_cast<unsigned char>(sa[i2]))) ++i2;
                while (j2 < sb.size() && std::isdigit(static_cast<unsigned char>(sb[j2]))) ++j2;
                const unsigned long long na = std::stoull(sa.substr(i, i2 - i));
                const unsigned long long nb = std::stoull(sb.substr(j, j2 - j));
                if (na != nb) return na < nb;
                i = i2;
                j = j2;
            } else {
                if (sa[i] != sb[j]) return sa[i] < sb[j];
                ++i;
                ++j;
            }
        }
        return sa.size() < sb.size();
    };
    std::sort(files.begin(), files.end(), natural_less);
    return files;
}

} // namespace rominv
