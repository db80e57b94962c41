#include "dgc/raster_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace dgc {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::optional<double> to_double(const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = first + tok.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

struct Token {
  std::string text;
  int line;
  int column;
};

// Splits a line into whitespace-separated tokens with 1-based columns.
std::vector<Token> tokenize(const std::string& line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), line_no, static_cast<int>(start) + 1});
  }
  return out;
}

}  // namespace

RasterFile parse_raster(std::istream& in) {
  RasterMeta meta;
  std::optional<long long> ncols, nrows;
  std::vector<Token> body;
  std::string line;
  int line_no = 0;
  bool in_body = false;

  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokenize(line, line_no);
    if (toks.empty()) continue;
    if (!in_body && std::isalpha(static_cast<unsigned char>(toks[0].text[0])) && lower(toks[0].text) != "nodata" &&
        lower(toks[0].text) != "nan") {
      const std::string key = lower(toks[0].text);
      if (toks.size() != 2) throw ParseError("header line must be '<key> <value>'", line_no, toks[0].column);
      const auto v = to_double(toks[1].text);
      if (!v) throw ParseError("unreadable number '" + toks[1].text + "'", line_no, toks[1].column);
      if (key == "ncols" || key == "nrows") {
        if (*v < 1 || *v != std::floor(*v)) throw ParseError(key + " must be a positive integer", line_no, toks[1].column);
        (key == "ncols" ? ncols : nrows) = static_cast<long long>(*v);
      } else if (key == "xllcorner" || key == "xllcenter") {
        meta.xll = *v;
        meta.center = key == "xllcenter";
      } else if (key == "yllcorner" || key == "yllcenter") {
        meta.yll = *v;
      } else if (key == "cellsize") {
        meta.cell_size = *v;
      } else if (key == "nodata_value") {
        meta.nodata = *v;
      } else {
        throw ParseError("unknown header key '" + toks[0].text + "'", line_no, toks[0].column);
      }
      continue;
    }
    in_body = true;
    body.insert(body.end(), toks.begin(), toks.end());
  }

  if (!ncols || !nrows) throw ParseError("header must define ncols and nrows", line_no, 0);
  const auto expected = static_cast<std::size_t>(*ncols * *nrows);
  if (body.size() != expected) {
    const int at_line = body.size() > expected ? body[expected].line : line_no;
    const int at_col = body.size() > expected ? body[expected].column : 0;
    throw ParseError("body has " + std::to_string(body.size()) + " values, header declares " +
                         std::to_string(*nrows) + " x " + std::to_string(*ncols),
                     at_line, at_col);
  }

  GridArray<double> values(*nrows, *ncols);
  Mask mask(*nrows, *ncols);
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto r = static_cast<Index>(i / static_cast<std::size_t>(*ncols));
    const auto c = static_cast<Index>(i % static_cast<std::size_t>(*ncols));
    const std::string low = lower(body[i].text);
    if (low == "nodata" || low == "nan") {
      values(r, c) = Raster::missing_value();
      mask(r, c) = false;
      continue;
    }
    const auto v = to_double(body[i].text);
    if (!v || !std::isfinite(*v))
      throw ParseError("unreadable number '" + body[i].text + "'", body[i].line, body[i].column);
    mask(r, c) = *v != meta.nodata;
    values(r, c) = *v;
  }
  return {Raster(std::move(values), std::move(mask)), meta};
}

RasterFile read_raster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open raster '" + path.string() + "'", 0, 0);
  return parse_raster(in);
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_raster(std::ostream& out, const Raster& grid, const RasterMeta& meta) {
  out << "ncols " << grid.cols() << '\n'
      << "nrows " << grid.rows() << '\n'
      << (meta.center ? "xllcenter " : "xllcorner ") << format_number(meta.xll) << '\n'
      << (meta.center ? "yllcenter " : "yllcorner ") << format_number(meta.yll) << '\n'
      << "cellsize " << format_number(meta.cell_size) << '\n'
      << "NODATA_value " << format_number(meta.nodata) << '\n';
  const std::string nodata = format_number(meta.nodata);
  for (Index r = 0; r < grid.rows(); ++r) {
    for (Index c = 0; c < grid.cols(); ++c) {
      if (c) out << ' ';
      if (!grid.is_sampled(r, c)) {
        out << nodata;
        continue;
      }
      if (grid.value(r, c) == meta.nodata)
        throw Error("write_raster: value at (" + std::to_string(r) + ", " + std::to_string(c) +
                    ") collides with the NODATA sentinel");
      out << format_number(grid.value(r, c));
    }
    out << '\n';
  }
}

void write_raster(const std::filesystem::path& path, const Raster& grid, const RasterMeta& meta) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write raster '" + path.string() + "'");
  write_raster(out, grid, meta);
}

}  // namespace dgc
