#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rominv/series.hpp"

namespace rominv {

// Parsed legacy VTK point cloud: coordinates plus named per-point vector
// arrays, kept in file order. Cell connectivity is skipped at parse time and
// never stored.
struct Grid {
    using Vec3 = std::array<double, 3>;

    std::vector<Vec3> points;
    std::vector<std::pair<std::string, std::vector<Vec3>>> vectors;

    const std::vector<Vec3>* find_vectors(std::string_view name) const;
};

// Parses legacy ASCII VTK text (UNSTRUCTURED_GRID with POINTS and
// POINT_DATA/VECTORS sections). CELLS/CELL_TYPES/SCALARS sections are
// skipped. Typed failures:
//   BadMagicError         missing "# vtk DataFile Version" magic or format line
//   BinaryUnsupportedError BINARY marker (only ASCII is handled)
//   UnknownDatasetError   DATASET other than UNSTRUCTURED_GRID
//   TruncatedSectionError fewer numbers than a section declares, or malformed
//                         section structure
Grid parse_legacy_vtk(std::string_view text);

// Emits the grid back as legacy ASCII VTK; parse_legacy_vtk on the result
// reproduces the grid field-for-field.
std::string write_legacy_vtk(const Grid& grid, const std::string& title = "rominv grid");

struct SurfacePick {
    double magnitude;      // sqrt(u^2 + v^2) of the selected point, meters
    std::size_t index;     // point index in file order
    std::size_t tie_count; // additional points matching the selector
};

// Selects the point at (min x, max y), both within relative tolerance 1e-9,
// and returns the in-plane magnitude of the named vector there. Exact ties
// resolve to the first point in file order.
SurfacePick surface_displacement(const Grid& grid, std::string_view vector_name);

// Ordered snapshot files with their time stamps (days), strictly increasing.
struct SnapshotSet {
    std::vector<std::pair<double, std::filesystem::path>> entries;
    std::string vector_name;

    void validate() const; // throws ConfigError
};

// Parses every snapshot and assembles the surface-displacement time series.
// All snapshots must select the same surface point
// (InconsistentSurfacePointError) and the time stamps must be uniformly
// spaced (ConfigError).
TimeSeries build_series(const SnapshotSet& snapshots);

// Reads a whole file; IoError on failure.
std::string read_text_file(const std::filesystem::path& path);

// *.vtk files under dir in natural order (embedded integers compared
// numerically, so step_2.vtk sorts before step_10.vtk).
std::vector<std::filesystem::path> list_vtk_files(const std::filesystem::path& dir);

} // namespace rominv
