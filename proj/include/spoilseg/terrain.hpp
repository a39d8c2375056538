#pragma once

#include "spoilseg/raster.hpp"

namespace spoilseg::terrain {

/// Sun position for Horn hillshading. Azimuth is clockwise from north.
struct HillshadeParams {
    double azimuth_deg = 315.0;
    double altitude_deg = 45.0;
    double z_factor = 1.0;

    void validate() const;
};

/// Logistic contrast stretch; the logistic slope is strength * scale.
struct StretchParams {
    double strength = 3.0;
    double scale = 2.0;

    void validate() const;
};

/// Horn 3x3 hillshade in [0, 1]. Borders replicate the edge cell; any cell
/// whose 3x3 window touches nodata becomes nodata (same sentinel as input).
ScalarGrid hillshade(const ScalarGrid& dsm, const HillshadeParams& params = {});

/// Min-max normalise, apply the logistic curve centred at 0.5, and rescale
/// so the grid minimum maps to 0 and the maximum to 1. Nodata passes through.
ScalarGrid sigmoidal_stretch(const ScalarGrid& grid, const StretchParams& params = {});

/// v -> floor(v * 255 + 0.5); nodata -> 0. Values must lie in [0, 1].
GrayImage quantize8(const ScalarGrid& grid);

} // namespace spoilseg::terrain
