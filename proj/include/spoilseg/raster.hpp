#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spoilseg/error.hpp"

namespace spoilseg {

/// Row-major pixel grid. Index (x, y) maps to y * width + x.
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
    {
    }

    std::size_t size() const noexcept { return data.size(); }
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }

    T& operator()(int x, int y) { return data[index(x, y)]; }
    const T& operator()(int x, int y) const { return data[index(x, y)]; }

    bool same_shape(int w, int h) const noexcept { return width == w && height == h; }
    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept
    {
        return width == other.width && height == other.height;
    }

    bool operator==(const Grid&) const = default;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

using RasterRGB = Grid<Rgb>;
using GrayImage = Grid<std::uint8_t>;
/// 0 = background, positive values identify regions.
using LabelMap = Grid<std::uint32_t>;
/// Nonzero marks foreground.
using Mask = Grid<std::uint8_t>;

/// Single-band floating point raster (DSM, hillshade, blurred image).
struct ScalarGrid : Grid<double> {
    double cellsize = 1.0;
    std::optional<double> nodata;

    ScalarGrid() = default;
    ScalarGrid(int w, int h, double fill = 0.0) : Grid<double>(w, h, fill) {}

    bool is_nodata(std::size_t i) const noexcept { return nodata && data[i] == *nodata; }

    bool operator==(const ScalarGrid&) const = default;
};

enum class Connectivity { four = 4, eight = 8 };

/// Sorted distinct positive labels present in the map.
std::vector<std::uint32_t> positive_labels(const LabelMap& map);

namespace io {

// In-memory codecs; the path-based functions below wrap these.
RasterRGB decode_ppm(std::string_view bytes);
std::string encode_ppm(const RasterRGB& image);
GrayImage decode_pgm8(std::string_view bytes);
std::string encode_pgm8(const GrayImage& image);
LabelMap decode_pgm16(std::string_view bytes);
std::string encode_pgm16(const LabelMap& map);
ScalarGrid decode_asc_grid(std::string_view text);
std::string encode_asc_grid(const ScalarGrid& grid);

RasterRGB read_ppm(const std::filesystem::path& path);
void write_ppm(const RasterRGB& image, const std::filesystem::path& path);

GrayImage read_pgm8(const std::filesystem::path& path);
void write_pgm8(const GrayImage& image, const std::filesystem::path& path);

LabelMap read_pgm16(const std::filesystem::path& path);
void write_pgm16(const LabelMap& map, const std::filesystem::path& path);

ScalarGrid read_asc_grid(const std::filesystem::path& path);
void write_asc_grid(const ScalarGrid& grid, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

} // namespace io

/// Relabels so every positive label is one connected component, numbered
/// 1..K in raster-scan discovery order. Background stays 0.
LabelMap relabel_connected(const LabelMap& map, Connectivity connectivity = Connectivity::four);

} // namespace spoilseg
