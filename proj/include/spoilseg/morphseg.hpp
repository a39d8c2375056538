#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spoilseg/raster.hpp"

namespace spoilseg::morph {

struct Seed {
    int x = 0;
    int y = 0;
    std::uint8_t intensity = 0;

    bool operator==(const Seed&) const = default;
};

using SeedSet = std::vector<Seed>;

struct VoronoiParams {
    double sigma = 12.0;
    /// Local-maximum neighbourhood (Chebyshev radius); unset means ceil(sigma).
    std::optional<int> peak_radius;
    bool restrict_to_foreground = true;
    /// Treat pixels at or below the Otsu threshold as foreground instead.
    bool invert = false;

    int effective_peak_radius() const;
    void validate() const;
};

struct OtsuResult {
    int threshold = 0;
    Mask mask;
};

/// Separable Gaussian, kernel truncated at ceil(3 sigma) and normalised to
/// sum 1, edge replication at the borders.
ScalarGrid gaussian_blur(const GrayImage& img, double sigma);
ScalarGrid gaussian_blur(const ScalarGrid& grid, double sigma);

/// Plateau-aware local maxima with greedy non-maximum suppression.
SeedSet detect_local_maxima(const ScalarGrid& grid, int peak_radius);

/// Threshold maximising between-class variance (ties: smallest t); the mask
/// marks value > t. Throws degenerate_input for a constant image.
OtsuResult otsu_threshold(const GrayImage& img);

SeedSet filter_background_seeds(const SeedSet& seeds, const Mask& mask);

/// Nearest seed in Euclidean distance, ties to the lower seed index; seed i
/// gets label i + 1. With a mask, background pixels stay 0.
LabelMap voronoi_label(const SeedSet& seeds, int width, int height, const Mask* mask = nullptr);

struct VoronoiStages {
    ScalarGrid blurred;
    SeedSet candidates;
    int threshold = 0;
    Mask foreground;
    SeedSet seeds;
    LabelMap labels;
};

VoronoiStages voronoi_stages(const GrayImage& hillshade8, const VoronoiParams& params);
LabelMap voronoi_pipeline(const GrayImage& hillshade8, const VoronoiParams& params);

/// Round-half-up requantisation of a blurred 8-bit image, clamped to 0..255.
GrayImage requantize8(const ScalarGrid& grid);

} // namespace spoilseg::morph
