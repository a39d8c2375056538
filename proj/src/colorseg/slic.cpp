#include "spoilseg/colorseg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "../region_graph.hpp"

namespace spoilseg::colorseg {

void SlicParams::validate(std::size_t pixel_count) const
{
    if (superpixels < 1) throw Error(ErrorKind::invalid_argument, "superpixel count must be >= 1");
    if (static_cast<std::size_t>(superpixels) > pixel_count) {
        throw Error(ErrorKind::invalid_argument, "superpixel count exceeds pixel count");
    }
    if (!(compactness > 0.0)) throw Error(ErrorKind::invalid_argument, "compactness must be positive");
    if (iterations < 1) throw Error(ErrorKind::invalid_argument, "iterations must be >= 1");
    if (min_size < 0) throw Error(ErrorKind::invalid_argument, "min_size must be non-negative");
}

int slic_step(int width, int height, int superpixels)
{
    const double n = static_cast<double>(width) * static_cast<double>(height);
    return std::max(1, static_cast<int>(std::lround(std::sqrt(n / superpixels))));
}

namespace {

double lab_dist2(const Lab& p, const Lab& q)
{
    const double dl = p.L - q.L;
    const double da = p.a - q.a;
    const double db = p.b - q.b;
    return dl * dl + da * da + db * db;
}

// Centre coordinates of `count` cells tiling [0, extent).
std::vector<int> grid_positions(int extent, int step)
{
    const int count = std::max(1, static_cast<int>(std::lround(static_cast<double>(extent) / step)));
    const double cell = static_cast<double>(extent) / count;
    std::vector<int> pos;
    for (int i = 0; i < count; ++i) pos.push_back(std::min(extent - 1, static_cast<int>((i + 0.5) * cell)));
    return pos;
}

} // namespace

std::vector<SlicCenter> slic_seed_centers(const LabImage& lab, int superpixels)
{
    const int step = slic_step(lab.width, lab.height, superpixels);
    auto at = [&](int x, int y) -> const Lab& {
        return lab(std::clamp(x, 0, lab.width - 1), std::clamp(y, 0, lab.height - 1));
    };
    auto gradient = [&](int x, int y) {
        return lab_dist2(at(x + 1, y), at(x - 1, y)) + lab_dist2(at(x, y + 1), at(x, y - 1));
    };

    std::vector<SlicCenter> centers;
    for (int gy : grid_positions(lab.height, step)) {
        for (int gx : grid_positions(lab.width, step)) {
            int bx = gx, by = gy;
            double best = gradient(gx, gy);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int x = gx + dx, y = gy + dy;
                    if (!lab.contains(x, y)) continue;
                    const double g = gradient(x, y);
                    if (g < best) {
                        best = g;
                        bx = x;
                        by = y;
                    }
                }
            }
            const auto& c = lab(bx, by);
            centers.push_back({c.L, c.a, c.b, static_cast<double>(bx), static_cast<double>(by)});
        }
    }
    return centers;
}

double slic_distance(const Lab& px, int x, int y, const SlicCenter& c, double step, double compactness)
{
    const double dl = px.L - c.L, da = px.a - c.a, db = px.b - c.b;
    const double dx = x - c.x, dy = y - c.y;
    const double spatial = (dx * dx + dy * dy) / (step * step);
    return std::sqrt(dl * dl + da * da + db * db + spatial * compactness * compactness);
}

std::vector<int> slic_assign(const LabImage& lab, std::span<const SlicCenter> centers, double step,
                             double compactness)
{
    std::vector<int> label(lab.size(), -1);
    std::vector<double> dist(lab.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const auto& c = centers[k];
        const int x0 = std::max(0, static_cast<int>(std::ceil(c.x - step)));
        const int x1 = std::min(lab.width - 1, static_cast<int>(std::floor(c.x + step)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - step)));
        const int y1 = std::min(lab.height - 1, static_cast<int>(std::floor(c.y + step)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const auto i = lab.index(x, y);
                const double d = slic_distance(lab.data[i], x, y, c, step, compactness);
                // Centers are visited in index order, so strict < keeps the lower index on ties.
                if (d < dist[i]) {
                    dist[i] = d;
                    label[i] = static_cast<int>(k);
                }
            }
        }
    }
    return label;
}

LabelMap slic(const LabImage& lab, const SlicParams& params)
{
    params.validate(lab.size());
    const int step_i = slic_step(lab.width, lab.height, params.superpixels);
    const double step = step_i;
    auto centers = slic_seed_centers(lab, params.superpixels);

    std::vector<int> assignment;
    for (int it = 0; it < params.iterations; ++it) {
        assignment = slic_assign(lab, centers, step, params.compactness);
        for (int y = 0; y < lab.height; ++y) {
            for (int x = 0; x < lab.width; ++x) {
                auto& a = assignment[lab.index(x, y)];
                if (a >= 0) continue;
                // Outside every window: nearest center over all of them.
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < centers.size(); ++k) {
                    const double d = slic_distance(lab(x, y), x, y, centers[k], step, params.compactness);
                    if (d < best) {
                        best = d;
                        a = static_cast<int>(k);
                    }
                }
            }
        }

        std::vector<SlicCenter> sums(centers.size());
        std::vector<long> counts(centers.size(), 0);
        for (int y = 0; y < lab.height; ++y) {
            for (int x = 0; x < lab.width; ++x) {
                const auto i = lab.index(x, y);
                const auto k = static_cast<std::size_t>(assignment[i]);
                const auto& px = lab.data[i];
                sums[k].L += px.L;
                sums[k].a += px.a;
                sums[k].b += px.b;
                sums[k].x += x;
                sums[k].y += y;
                ++counts[k];
            }
        }
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (counts[k] == 0) continue;
            const double n = static_cast<double>(counts[k]);
            centers[k] = {sums[k].L / n, sums[k].a / n, sums[k].b / n, sums[k].x / n, sums[k].y / n};
        }
    }

    LabelMap labels(lab.width, lab.height);
    for (std::size_t i = 0; i < labels.size(); ++i) labels.data[i] = static_cast<std::uint32_t>(assignment[i] + 1);

    const int min_size =
        params.min_size > 0 ? params.min_size
                            : static_cast<int>(lab.size() / static_cast<std::size_t>(params.superpixels) / 4);
    return enforce_connectivity(labels, std::max(1, min_size));
}

LabelMap enforce_connectivity(const LabelMap& map, int min_size)
{
    const LabelMap components = relabel_connected(map, Connectivity::four);
    detail::RegionGraph graph(components);

    std::set<std::pair<std::int64_t, std::uint32_t>> small;
    for (std::uint32_t id = 1; id <= graph.region_count(); ++id) {
        if (graph.size[id] < min_size) small.emplace(graph.size[id], id);
    }
    while (!small.empty()) {
        const auto [sz, id] = *small.begin();
        small.erase(small.begin());
        if (graph.boundary[id].empty()) continue;

        std::uint32_t best = 0;
        std::int64_t best_len = -1;
        for (const auto& [nb, len] : graph.boundary[id]) {
            if (len > best_len) {
                best_len = len;
                best = nb;
            }
        }
        small.erase({graph.size[best], best});
        graph.merge(id, best);
        if (graph.size[best] < min_size) small.emplace(graph.size[best], best);
    }
    return relabel_connected(graph.apply(components), Connectivity::four);
}

} // namespace spoilseg::colorseg
