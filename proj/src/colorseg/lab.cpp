#include "spoilseg/colorseg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace spoilseg::colorseg {

namespace {

// D65 reference white.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.00000;
constexpr double kZn = 1.08883;

constexpr double kEpsilon = 216.0 / 24389.0;  // (6/29)^3
constexpr double kKappa = 24389.0 / 27.0;     // (29/3)^3

std::array<double, 256> make_linear_table()
{
    std::array<double, 256> table{};
    for (int i = 0; i < 256; ++i) {
        const double c = i / 255.0;
        table[static_cast<std::size_t>(i)] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return table;
}

const std::array<double, 256>& linear_table()
{
    static const auto table = make_linear_table();
    return table;
}

double lab_f(double t)
{
    return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

} // namespace

Lab rgb_to_lab(Rgb px)
{
    const auto& lin = linear_table();
    const double r = lin[px.r];
    const double g = lin[px.g];
    const double b = lin[px.b];

    const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    const double fx = lab_f(X / kXn);
    const double fy = lab_f(Y / kYn);
    const double fz = lab_f(Z / kZn);
    return Lab{std::clamp(116.0 * fy - 16.0, 0.0, 100.0), 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage rgb_to_lab(const RasterRGB& img)
{
    LabImage out(img.width, img.height);
    std::transform(img.data.begin(), img.data.end(), out.data.begin(),
                   [](Rgb px) { return rgb_to_lab(px); });
    return out;
}

} // namespace spoilseg::colorseg
