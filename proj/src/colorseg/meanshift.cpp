#include "spoilseg/colorseg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "../parallel.hpp"
#include "../region_graph.hpp"

namespace spoilseg::colorseg {

void MeanShiftParams::validate() const
{
    if (!(spatial_radius >= 1.0)) throw Error(ErrorKind::invalid_argument, "spatial radius must be >= 1");
    if (!(range_radius > 0.0)) throw Error(ErrorKind::invalid_argument, "range radius must be positive");
    if (min_region_size < 1) throw Error(ErrorKind::invalid_argument, "minimum region size must be >= 1");
    if (!(convergence_eps > 0.0)) throw Error(ErrorKind::invalid_argument, "convergence eps must be positive");
    if (max_iterations < 1) throw Error(ErrorKind::invalid_argument, "max iterations must be >= 1");
}

namespace {

struct JointPoint {
    double x, y, r, g, b;
};

// Iterates one pixel to its mode. When trace is non-null, the normalised
// displacement of every iteration is appended.
Mode seek_mode(const RasterRGB& img, const MeanShiftParams& p, int px, int py, std::vector<double>* trace)
{
    const auto& c0 = img(px, py);
    JointPoint cur{static_cast<double>(px), static_cast<double>(py), static_cast<double>(c0.r),
                   static_cast<double>(c0.g), static_cast<double>(c0.b)};
    const double hs = p.spatial_radius;
    const double hr = p.range_radius;
    const double hs2 = hs * hs;
    const double hr2 = hr * hr;

    int it = 0;
    while (it < p.max_iterations) {
        ++it;
        const int x0 = std::max(0, static_cast<int>(std::ceil(cur.x - hs)));
        const int x1 = std::min(img.width - 1, static_cast<int>(std::floor(cur.x + hs)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(cur.y - hs)));
        const int y1 = std::min(img.height - 1, static_cast<int>(std::floor(cur.y + hs)));

        double sx = 0, sy = 0, sr = 0, sg = 0, sb = 0;
        long count = 0;
        for (int y = y0; y <= y1; ++y) {
            const double dy = y - cur.y;
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - cur.x;
                if (dx * dx + dy * dy > hs2) continue;
                const auto& c = img(x, y);
                const double dr = c.r - cur.r;
                const double dg = c.g - cur.g;
                const double db = c.b - cur.b;
                if (dr * dr + dg * dg + db * db > hr2) continue;
                sx += x;
                sy += y;
                sr += c.r;
                sg += c.g;
                sb += c.b;
                ++count;
            }
        }
        if (count == 0) break;

        const double n = static_cast<double>(count);
        const JointPoint next{sx / n, sy / n, sr / n, sg / n, sb / n};
        const double ds = ((next.x - cur.x) * (next.x - cur.x) + (next.y - cur.y) * (next.y - cur.y)) / hs2;
        const double dc = ((next.r - cur.r) * (next.r - cur.r) + (next.g - cur.g) * (next.g - cur.g) +
                           (next.b - cur.b) * (next.b - cur.b)) /
                          hr2;
        const double displacement = std::sqrt(ds + dc);
        cur = next;
        if (trace) trace->push_back(displacement);
        if (displacement < p.convergence_eps) break;
    }
    return Mode{cur.x, cur.y, cur.r, cur.g, cur.b, it};
}

} // namespace

ModeImage mean_shift_filter(const RasterRGB& img, const MeanShiftParams& params)
{
    params.validate();
    ModeImage out(img.width, img.height);
    detail::parallel_for(static_cast<std::size_t>(img.height), [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < img.width; ++x) out(x, y) = seek_mode(img, params, x, y, nullptr);
    });
    return out;
}

std::vector<double> mean_shift_trajectory(const RasterRGB& img, const MeanShiftParams& params, int x, int y)
{
    params.validate();
    if (!img.contains(x, y)) throw Error(ErrorKind::out_of_range, "pixel outside image");
    std::vector<double> trace;
    seek_mode(img, params, x, y, &trace);
    return trace;
}

LabelMap mean_shift_cluster(const ModeImage& modes, const MeanShiftParams& params)
{
    const double hs2 = params.spatial_radius * params.spatial_radius;
    const double hr2 = params.range_radius * params.range_radius;
    auto linked = [&](const Mode& a, const Mode& b) {
        const double ds = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
        const double dc = (a.r - b.r) * (a.r - b.r) + (a.g - b.g) * (a.g - b.g) + (a.b - b.b) * (a.b - b.b);
        return ds <= hs2 && dc <= hr2;
    };

    // Union-find over pixels, then number roots in scan order.
    std::vector<std::size_t> parent(modes.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    for (int y = 0; y < modes.height; ++y) {
        for (int x = 0; x < modes.width; ++x) {
            const auto i = modes.index(x, y);
            if (x + 1 < modes.width && linked(modes.data[i], modes(x + 1, y))) unite(i, modes.index(x + 1, y));
            if (y + 1 < modes.height && linked(modes.data[i], modes(x, y + 1))) unite(i, modes.index(x, y + 1));
        }
    }

    LabelMap out(modes.width, modes.height, 0);
    std::vector<std::uint32_t> root_label(modes.size(), 0);
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto r = find(i);
        if (root_label[r] == 0) root_label[r] = ++next;
        out.data[i] = root_label[r];
    }
    return out;
}

LabelMap fuse_small_regions(const LabelMap& regions, const ModeImage& modes, int min_size)
{
    if (!regions.same_shape(modes)) throw Error(ErrorKind::dimension_mismatch, "regions and modes differ in size");
    const LabelMap components = relabel_connected(regions, Connectivity::four);
    detail::RegionGraph graph(components);
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto id = components.data[i];
        if (id == 0) continue;
        graph.colour_sum[id][0] += modes.data[i].r;
        graph.colour_sum[id][1] += modes.data[i].g;
        graph.colour_sum[id][2] += modes.data[i].b;
    }

    auto mean = [&](std::uint32_t id, int c) { return graph.colour_sum[id][c] / static_cast<double>(graph.size[id]); };

    std::set<std::pair<std::int64_t, std::uint32_t>> small;
    for (std::uint32_t id = 1; id <= graph.region_count(); ++id) {
        if (graph.size[id] < min_size) small.emplace(graph.size[id], id);
    }
    while (!small.empty()) {
        const auto [sz, id] = *small.begin();
        small.erase(small.begin());
        if (graph.boundary[id].empty()) continue;

        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& [nb, count] : graph.boundary[id]) {
            double d = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double diff = mean(id, c) - mean(nb, c);
                d += diff * diff;
            }
            if (d < best_d) {  // map order visits lower ids first
                best_d = d;
                best = nb;
            }
        }
        small.erase({graph.size[best], best});
        graph.merge(id, best);
        if (graph.size[best] < min_size) small.emplace(graph.size[best], best);
    }
    return relabel_connected(graph.apply(components), Connectivity::four);
}

LabelMap mean_shift_segment(const RasterRGB& img, const MeanShiftParams& params)
{
    params.validate();
    const ModeImage modes = mean_shift_filter(img, params);
    const LabelMap clusters = mean_shift_cluster(modes, params);
    return fuse_small_regions(clusters, modes, params.min_region_size);
}

} // namespace spoilseg::colorseg
