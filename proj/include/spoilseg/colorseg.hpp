#pragma once

#include <span>
#include <vector>

#include "spoilseg/raster.hpp"

namespace spoilseg::colorseg {

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;

    bool operator==(const Lab&) const = default;
};

using LabImage = Grid<Lab>;

/// sRGB (D65) to CIELAB.
Lab rgb_to_lab(Rgb px);
LabImage rgb_to_lab(const RasterRGB& img);

// ---------------------------------------------------------------------------
// Mean shift
// ---------------------------------------------------------------------------

/// Flat-kernel joint spatial/range mean shift. Range space is raw RGB DN.
struct MeanShiftParams {
    double spatial_radius = 5.0;  // h_s, pixels
    double range_radius = 20.0;   // h_r, DN
    int min_region_size = 10000;  // M, pixels
    double convergence_eps = 0.01;
    int max_iterations = 50;

    void validate() const;
};

/// Converged joint-space point for one pixel.
struct Mode {
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
    int iterations = 0;
};

using ModeImage = Grid<Mode>;

ModeImage mean_shift_filter(const RasterRGB& img, const MeanShiftParams& params);

/// Normalised joint displacement of each iteration for the pixel at (x, y).
std::vector<double> mean_shift_trajectory(const RasterRGB& img, const MeanShiftParams& params, int x, int y);

/// Filter, link 4-adjacent pixels with nearby modes, fuse regions smaller
/// than min_region_size, relabel 1..K in scan order.
LabelMap mean_shift_segment(const RasterRGB& img, const MeanShiftParams& params);

/// Clustering stage only: components of the mode link graph, labelled in
/// scan order. Exposed for testing the fusion stage in isolation.
LabelMap mean_shift_cluster(const ModeImage& modes, const MeanShiftParams& params);

/// Fusion stage: repeatedly merge the smallest region below min_size into the
/// 4-adjacent region whose mean mode colour is closest (ties: lower id).
LabelMap fuse_small_regions(const LabelMap& regions, const ModeImage& modes, int min_size);

// ---------------------------------------------------------------------------
// SLIC
// ---------------------------------------------------------------------------

struct SlicParams {
    int superpixels = 550;  // k
    double compactness = 30.0;  // m
    int iterations = 10;
    /// Minimum component size for connectivity enforcement; 0 means (N/k)/4.
    int min_size = 0;

    void validate(std::size_t pixel_count) const;
};

struct SlicCenter {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// Grid step S = round(sqrt(N / k)), at least 1.
int slic_step(int width, int height, int superpixels);

/// Centers on the S-grid, each moved to the lowest-gradient pixel of its 3x3
/// neighbourhood.
std::vector<SlicCenter> slic_seed_centers(const LabImage& lab, int superpixels);

/// One assignment step: every center claims the pixels of its 2S x 2S window;
/// each pixel takes the claiming center with smallest D (ties: lower index).
/// Pixels no window reaches get -1.
std::vector<int> slic_assign(const LabImage& lab, std::span<const SlicCenter> centers, double step,
                             double compactness);

double slic_distance(const Lab& px, int x, int y, const SlicCenter& c, double step, double compactness);

LabelMap slic(const LabImage& lab, const SlicParams& params);

/// Absorbs 4-connected components smaller than min_size into the adjacent
/// component sharing the longest boundary (ties: lower component id),
/// smallest component first. Output labels are 1..K in scan order.
LabelMap enforce_connectivity(const LabelMap& map, int min_size);

} // namespace spoilseg::colorseg
