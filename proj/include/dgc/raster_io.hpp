#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dgc/grid.hpp"

namespace dgc {

/// ESRI ASCII grid header fields that do not affect the data model.
struct RasterMeta {
  double xll = 0.0;
  double yll = 0.0;
  bool center = false;  // xllcenter/yllcenter rather than corner
  double cell_size = 1.0;
  double nodata = -9999.0;
};

struct RasterFile {
  Raster grid;
  RasterMeta meta;
};

/// Parses
///
///     ncols 4
///     nrows 3
///     [xllcorner|xllcenter x] [yllcorner|yllcenter y] [cellsize c] [NODATA_value v]
///     <nrows x ncols values, row-major, first row = top>
///
/// Keys are case-insensitive. Body tokens equal to the sentinel, or the words
/// NODATA / NaN, become missing cells. Throws ParseError with line and column.
RasterFile parse_raster(std::istream& in);
RasterFile read_raster(const std::filesystem::path& path);

/// Writes the header and body with shortest round-trip number formatting.
/// Throws when a sampled value equals the nodata sentinel.
void write_raster(std::ostream& out, const Raster& grid, const RasterMeta& meta = {});
void write_raster(const std::filesystem::path& path, const Raster& grid, const RasterMeta& meta = {});

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace dgc
