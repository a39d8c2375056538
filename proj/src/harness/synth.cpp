#include "spoilseg/harness.hpp"

#include <cmath>
#include <random>

#include "spoilseg/terrain.hpp"

namespace spoilseg::harness {

namespace {

// Fixed mapping from the 64-bit engine to [0, 1) so fixtures do not depend on
// the standard library's distribution implementation.
double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

SynthField synth_pilefield(int rows, int cols, int n_bumps, double bump_sigma, std::uint64_t seed,
                           const SynthOptions& options)
{
    if (rows < 1 || cols < 1) throw Error(ErrorKind::invalid_argument, "canvas must be at least 1x1");
    if (n_bumps < 1) throw Error(ErrorKind::invalid_argument, "need at least one bump");
    if (!(bump_sigma > 0.0)) throw Error(ErrorKind::invalid_argument, "bump sigma must be positive");
    if (!(options.amplitude > 0.0) || !(options.noise >= 0.0)) {
        throw Error(ErrorKind::invalid_argument, "amplitude must be positive and noise non-negative");
    }

    const int grid_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_bumps))));
    const int grid_rows = (n_bumps + grid_cols - 1) / grid_cols;
    const double sx = static_cast<double>(cols) / grid_cols;
    const double sy = static_cast<double>(rows) / grid_rows;
    // Jitter stays below a quarter spacing, so neighbours keep at least half a
    // spacing apart; that must clear two 2-sigma label disks.
    if (std::min(sx, sy) / 2.0 < 4.0 * bump_sigma) {
        throw Error(ErrorKind::placement, "bumps do not fit the canvas without overlapping");
    }

    std::mt19937_64 rng(seed);
    SynthField out;
    for (int i = 0; i < n_bumps; ++i) {
        const int gr = i / grid_cols, gc = i % grid_cols;
        const double jx = (2.0 * uniform01(rng) - 1.0) * sx / 4.0 * 0.99;
        const double jy = (2.0 * uniform01(rng) - 1.0) * sy / 4.0 * 0.99;
        out.centers.emplace_back((gc + 0.5) * sx + jx, (gr + 0.5) * sy + jy);
    }

    out.dsm = ScalarGrid(cols, rows);
    out.gt = LabelMap(cols, rows);
    const double two_s2 = 2.0 * bump_sigma * bump_sigma;
    const double r2 = 4.0 * bump_sigma * bump_sigma;
    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
            double z = (2.0 * uniform01(rng) - 1.0) * options.noise;
            double best = r2;
            std::uint32_t label = 0;
            for (std::size_t k = 0; k < out.centers.size(); ++k) {
                const double dx = x - out.centers[k].first, dy = y - out.centers[k].second;
                const double d2 = dx * dx + dy * dy;
                z += options.amplitude * std::exp(-d2 / two_s2);
                if (d2 <= best) {
                    if (label == 0 || d2 < best) label = static_cast<std::uint32_t>(k + 1);
                    best = d2;
                }
            }
            out.dsm(x, y) = z;
            out.gt(x, y) = label;
        }
    }
    return out;
}

GrayImage relief8(const ScalarGrid& dsm)
{
    return terrain::quantize8(terrain::sigmoidal_stretch(dsm));
}

LabelMap normalize_mask(const LabelMap& mask, std::int64_t min_region, Connectivity connectivity)
{
    if (min_region < 0) throw Error(ErrorKind::invalid_argument, "min_region must be non-negative");
    LabelMap labels = relabel_connected(mask, connectivity);
    if (min_region <= 1) return labels;

    std::vector<std::int64_t> sizes;
    for (auto v : labels.data) {
        if (v >= sizes.size()) sizes.resize(v + 1, 0);
        ++sizes[v];
    }
    for (auto& v : labels.data) {
        if (v != 0 && sizes[v] < min_region) v = 0;
    }
    return relabel_connected(labels, connectivity);
}

IngestedMask ingest_external_mask(const std::filesystem::path& path, const ExternalMaskMetadata& meta,
                                  std::int64_t min_region, Connectivity connectivity)
{
    const LabelMap raw = io::read_pgm16(path);
    IngestedMask out;
    out.metadata = meta;
    out.labels = normalize_mask(raw, min_region, connectivity);
    out.dropped_regions = static_cast<std::int64_t>(positive_labels(relabel_connected(raw, connectivity)).size()) -
                          static_cast<std::int64_t>(positive_labels(out.labels).size());
    return out;
}

} // namespace spoilseg::harness
