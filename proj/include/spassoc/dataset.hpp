#ifndef SPASSOC_DATASET_HPP
#define SPASSOC_DATASET_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "spassoc/geometry.hpp"

namespace spassoc {

/// Points file: CSV with header `s1,s2,x,y` and one numeric row per location.
/// Malformed content raises input_error carrying path and line number. The
/// parsed sample is validated against the geometry invariants before return.
PointSample parse_points_csv(const std::string& path);

/// A dense row-major matrix read from a matrix-text or PGM file.
struct Grid {
    std::size_t nrow = 0;
    std::size_t ncol = 0;
    std::vector<double> values; ///< nrow * ncol, row-major

    double at(std::size_t r, std::size_t c) const { return values[r * ncol + c]; }
};

/// Reads one grid, sniffing the format: a `P2`/`P5` magic selects PGM
/// (maxval <= 65535; P5 payloads are 1 or 2 bytes per sample, big-endian),
/// anything else is whitespace-separated matrix text, one row per line,
/// `#` lines ignored.
Grid parse_grid(const std::string& path);

/// Two equal-sized grids as a unit-spaced PointSample: the cell in row r,
/// column c (0-based, top-left origin) gets coordinates (s1, s2) = (c, r),
/// x from the first grid and y from the second. Dimension mismatch is an
/// input_error; the result is validated like any other sample.
PointSample parse_grid_pair(const std::string& path_x, const std::string& path_y);

/// Single-column numeric CSV (an optional non-numeric first line is treated
/// as a header). Used for the comovement time series.
std::vector<double> parse_series_csv(const std::string& path);

} // namespace spassoc

#endif // SPASSOC_DATASET_HPP
