#include "spoilseg/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spoilseg::terrain {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

} // namespace

void HillshadeParams::validate() const
{
    if (!(azimuth_deg >= 0.0 && azimuth_deg < 360.0)) {
        throw Error(ErrorKind::invalid_argument, "azimuth must lie in [0, 360)");
    }
    if (!(altitude_deg > 0.0 && altitude_deg <= 90.0)) {
        throw Error(ErrorKind::invalid_argument, "altitude must lie in (0, 90]");
    }
    if (!(z_factor > 0.0) || !std::isfinite(z_factor)) {
        throw Error(ErrorKind::invalid_argument, "z_factor must be positive");
    }
}

void StretchParams::validate() const
{
    if (!(strength > 0.0) || !std::isfinite(strength)) {
        throw Error(ErrorKind::invalid_argument, "stretch strength must be positive");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw Error(ErrorKind::invalid_argument, "stretch scale must be positive");
    }
}

ScalarGrid hillshade(const ScalarGrid& dsm, const HillshadeParams& params)
{
    params.validate();
    if (dsm.width < 3 || dsm.height < 3) {
        throw Error(ErrorKind::invalid_argument, "hillshade needs a grid of at least 3x3 cells");
    }
    if (!(dsm.cellsize > 0.0) || !std::isfinite(dsm.cellsize)) {
        throw Error(ErrorKind::invalid_argument, "hillshade needs a positive cellsize");
    }

    const double zenith = (90.0 - params.altitude_deg) * kDegToRad;
    // Compass bearing to mathematical angle (counter-clockwise from east).
    double azimuth_math = 360.0 - params.azimuth_deg + 90.0;
    if (azimuth_math >= 360.0) azimuth_math -= 360.0;
    const double azimuth = azimuth_math * kDegToRad;
    const double cos_zenith = std::cos(zenith);
    const double sin_zenith = std::sin(zenith);
    const double denom = 8.0 * dsm.cellsize;

    ScalarGrid out(dsm.width, dsm.height);
    out.cellsize = dsm.cellsize;
    out.nodata = dsm.nodata;

    auto clampx = [&](int x) { return std::clamp(x, 0, dsm.width - 1); };
    auto clampy = [&](int y) { return std::clamp(y, 0, dsm.height - 1); };

    for (int y = 0; y < dsm.height; ++y) {
        for (int x = 0; x < dsm.width; ++x) {
            // a b c / d e f / g h i, top row is north.
            double w[3][3];
            bool touches_nodata = false;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const auto idx = dsm.index(clampx(x + dx), clampy(y + dy));
                    touches_nodata = touches_nodata || dsm.is_nodata(idx);
                    w[dy + 1][dx + 1] = dsm.data[idx];
                }
            }
            if (touches_nodata) {
                out(x, y) = *dsm.nodata;
                continue;
            }
            const double dzdx = ((w[0][2] + 2.0 * w[1][2] + w[2][2]) - (w[0][0] + 2.0 * w[1][0] + w[2][0])) / denom;
            const double dzdy = ((w[2][0] + 2.0 * w[2][1] + w[2][2]) - (w[0][0] + 2.0 * w[0][1] + w[0][2])) / denom;
            const double slope = std::atan(params.z_factor * std::hypot(dzdx, dzdy));
            const double aspect = std::atan2(dzdy, -dzdx);
            const double value =
                cos_zenith * std::cos(slope) + sin_zenith * std::sin(slope) * std::cos(azimuth - aspect);
            out(x, y) = std::clamp(value, 0.0, 1.0);
        }
    }
    return out;
}

ScalarGrid sigmoidal_stretch(const ScalarGrid& grid, const StretchParams& params)
{
    params.validate();
    if (grid.size() == 0) throw Error(ErrorKind::invalid_argument, "cannot stretch an empty grid");

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_nodata(i)) continue;
        const double v = grid.data[i];
        if (!any) {
            lo = hi = v;
            any = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!any || !(hi > lo)) {
        throw Error(ErrorKind::degenerate_input, "sigmoidal stretch needs at least two distinct values");
    }

    const double gain = params.strength * params.scale;
    auto logistic = [gain](double x) { return 1.0 / (1.0 + std::exp(-gain * (x - 0.5))); };
    const double s0 = logistic(0.0);
    const double s1 = logistic(1.0);

    ScalarGrid out = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_nodata(i)) continue;
        const double x = (grid.data[i] - lo) / (hi - lo);
        out.data[i] = std::clamp((logistic(x) - s0) / (s1 - s0), 0.0, 1.0);
    }
    return out;
}

GrayImage quantize8(const ScalarGrid& grid)
{
    GrayImage out(grid.width, grid.height, 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_nodata(i)) continue;
        const double v = grid.data[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::out_of_range, "quantize8 expects values in [0, 1]");
        }
        out.data[i] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
    }
    return out;
}

} // namespace spoilseg::terrain
