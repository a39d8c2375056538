#include "spoilseg/morphseg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

namespace spoilseg::morph {

int VoronoiParams::effective_peak_radius() const
{
    return peak_radius ? *peak_radius : static_cast<int>(std::ceil(sigma));
}

void VoronoiParams::validate() const
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::invalid_argument, "sigma must be positive");
    if (effective_peak_radius() < 1) throw Error(ErrorKind::invalid_argument, "peak radius must be >= 1");
}

// ---------------------------------------------------------------------------
// Gaussian blur
// ---------------------------------------------------------------------------

ScalarGrid gaussian_blur(const ScalarGrid& grid, double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::invalid_argument, "sigma must be positive");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        total += w;
    }
    for (auto& w : kernel) w /= total;

    const int w = grid.width, h = grid.height;
    ScalarGrid tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * grid(std::clamp(x + k, 0, w - 1), y);
            }
            tmp(x, y) = acc;
        }
    }
    ScalarGrid out(w, h);
    out.cellsize = grid.cellsize;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * tmp(x, std::clamp(y + k, 0, h - 1));
            }
            out(x, y) = acc;
        }
    }
    return out;
}

ScalarGrid gaussian_blur(const GrayImage& img, double sigma)
{
    ScalarGrid g(img.width, img.height);
    std::copy(img.data.begin(), img.data.end(), g.data.begin());
    return gaussian_blur(g, sigma);
}

GrayImage requantize8(const ScalarGrid& grid)
{
    GrayImage out(grid.width, grid.height);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.data[i] = static_cast<std::uint8_t>(std::clamp(std::floor(grid.data[i] + 0.5), 0.0, 255.0));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local maxima
// ---------------------------------------------------------------------------

namespace {

// Sliding-window maximum along one line, window [i - r, i + r] clipped.
void line_max(const double* in, double* out, int n, std::ptrdiff_t stride, int r)
{
    std::deque<int> dq;
    int next = 0;
    for (int i = 0; i < n; ++i) {
        const int hi = std::min(n - 1, i + r);
        for (; next <= hi; ++next) {
            while (!dq.empty() && in[dq.back() * stride] <= in[next * stride]) dq.pop_back();
            dq.push_back(next);
        }
        while (dq.front() < i - r) dq.pop_front();
        out[i * stride] = in[dq.front() * stride];
    }
}

} // namespace

SeedSet detect_local_maxima(const ScalarGrid& grid, int peak_radius)
{
    if (peak_radius < 1) throw Error(ErrorKind::invalid_argument, "peak radius must be >= 1");
    const int w = grid.width, h = grid.height;
    if (w == 0 || h == 0) return {};

    std::vector<double> v(grid.data);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (grid.is_nodata(i)) v[i] = -std::numeric_limits<double>::infinity();
    }
    std::vector<double> rows(v.size()), window_max(v.size());
    for (int y = 0; y < h; ++y) line_max(&v[grid.index(0, y)], &rows[grid.index(0, y)], w, 1, peak_radius);
    for (int x = 0; x < w; ++x) line_max(&rows[grid.index(x, 0)], &window_max[grid.index(x, 0)], h, w, peak_radius);

    std::vector<std::uint8_t> candidate(v.size(), 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        candidate[i] = !grid.is_nodata(i) && v[i] >= window_max[i];
    }

    struct Peak {
        double value;
        std::size_t index;
    };
    std::vector<Peak> peaks;
    std::vector<std::uint8_t> visited(v.size(), 0);
    std::vector<std::size_t> members, stack;
    for (std::size_t start = 0; start < v.size(); ++start) {
        if (!candidate[start] || visited[start]) continue;
        // Plateau: 8-connected candidates sharing the same value.
        members.clear();
        stack.assign(1, start);
        visited[start] = 1;
        double sx = 0.0, sy = 0.0;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            members.push_back(i);
            const int x = static_cast<int>(i % static_cast<std::size_t>(w));
            const int y = static_cast<int>(i / static_cast<std::size_t>(w));
            sx += x;
            sy += y;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (!grid.contains(x + dx, y + dy)) continue;
                    const auto j = grid.index(x + dx, y + dy);
                    if (visited[j] || !candidate[j] || v[j] != v[start]) continue;
                    visited[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        const double cx = sx / static_cast<double>(members.size());
        const double cy = sy / static_cast<double>(members.size());
        std::size_t rep = members.front();
        double best = std::numeric_limits<double>::infinity();
        for (auto i : members) {
            const double dx = static_cast<double>(i % static_cast<std::size_t>(w)) - cx;
            const double dy = static_cast<double>(i / static_cast<std::size_t>(w)) - cy;
            const double d = dx * dx + dy * dy;
            if (d < best || (d == best && i < rep)) {
                best = d;
                rep = i;
            }
        }
        peaks.push_back({v[start], rep});
    }

    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        return a.value != b.value ? a.value > b.value : a.index < b.index;
    });

    SeedSet seeds;
    Grid<std::uint8_t> blocked(w, h, 0);
    for (const auto& p : peaks) {
        if (blocked.data[p.index]) continue;
        const int x = static_cast<int>(p.index % static_cast<std::size_t>(w));
        const int y = static_cast<int>(p.index / static_cast<std::size_t>(w));
        const auto intensity = static_cast<std::uint8_t>(std::clamp(std::floor(p.value + 0.5), 0.0, 255.0));
        seeds.push_back({x, y, intensity});
        for (int yy = std::max(0, y - peak_radius); yy <= std::min(h - 1, y + peak_radius); ++yy) {
            for (int xx = std::max(0, x - peak_radius); xx <= std::min(w - 1, x + peak_radius); ++xx) {
                blocked(xx, yy) = 1;
            }
        }
    }
    return seeds;
}

// ---------------------------------------------------------------------------
// Otsu
// ---------------------------------------------------------------------------

namespace {

using u128 = unsigned __int128;

// Exact sign of a/b - c/d (b, d > 0) by continued-fraction expansion.
int compare_fractions(u128 a, u128 b, u128 c, u128 d)
{
    for (;;) {
        const u128 qa = a / b, qc = c / d;
        if (qa != qc) return qa < qc ? -1 : 1;
        const u128 ra = a % b, rc = c % d;
        if (ra == 0 || rc == 0) return ra == rc ? 0 : (ra == 0 ? -1 : 1);
        // sign(ra/b - rc/d) == sign(d/rc - b/ra)
        const u128 old_b = b;
        a = d;
        b = rc;
        c = old_b;
        d = ra;
    }
}

} // namespace

OtsuResult otsu_threshold(const GrayImage& img)
{
    std::array<std::uint64_t, 256> hist{};
    for (auto v : img.data) ++hist[v];
    const std::uint64_t n = img.size();
    std::uint64_t total_sum = 0;
    int distinct = 0;
    for (int i = 0; i < 256; ++i) {
        total_sum += static_cast<std::uint64_t>(i) * hist[static_cast<std::size_t>(i)];
        distinct += hist[static_cast<std::size_t>(i)] > 0;
    }
    if (distinct < 2) throw Error(ErrorKind::degenerate_input, "Otsu threshold needs at least two distinct values");

    // Between-class variance times n^2 equals (n*S0 - n0*S)^2 / (n0*n1).
    const bool exact = n < (std::uint64_t{1} << 26);
    int best_t = -1;
    u128 best_num = 0, best_den = 1;
    long double best_ld = -1.0L;
    std::uint64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        n0 += hist[static_cast<std::size_t>(t)];
        s0 += static_cast<std::uint64_t>(t) * hist[static_cast<std::size_t>(t)];
        const std::uint64_t n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        if (exact) {
            const __int128 diff = static_cast<__int128>(n) * s0 - static_cast<__int128>(n0) * total_sum;
            const u128 mag = static_cast<u128>(diff < 0 ? -diff : diff);
            const u128 num = mag * mag;
            const u128 den = static_cast<u128>(n0) * n1;
            if (best_t < 0 || compare_fractions(num, den, best_num, best_den) > 0) {
                best_t = t;
                best_num = num;
                best_den = den;
            }
        } else {
            const long double diff = static_cast<long double>(n) * s0 - static_cast<long double>(n0) * total_sum;
            const long double value = diff * diff / (static_cast<long double>(n0) * n1);
            if (value > best_ld) {
                best_t = t;
                best_ld = value;
            }
        }
    }

    OtsuResult result{best_t, Mask(img.width, img.height, 0)};
    for (std::size_t i = 0; i < img.size(); ++i) result.mask.data[i] = img.data[i] > best_t;
    return result;
}

// ---------------------------------------------------------------------------
// Seeds and tessellation
// ---------------------------------------------------------------------------

SeedSet filter_background_seeds(const SeedSet& seeds, const Mask& mask)
{
    SeedSet kept;
    for (const auto& s : seeds) {
        if (!mask.contains(s.x, s.y)) {
            throw Error(ErrorKind::dimension_mismatch, "seed lies outside the foreground mask");
        }
        if (mask(s.x, s.y)) kept.push_back(s);
    }
    return kept;
}

LabelMap voronoi_label(const SeedSet& seeds, int width, int height, const Mask* mask)
{
    if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "Voronoi labelling needs at least one seed");
    if (width < 1 || height < 1) throw Error(ErrorKind::invalid_argument, "Voronoi canvas must be non-empty");
    if (mask && !mask->same_shape(width, height)) {
        throw Error(ErrorKind::dimension_mismatch, "mask size differs from the Voronoi canvas");
    }
    for (const auto& s : seeds) {
        if (s.x < 0 || s.y < 0 || s.x >= width || s.y >= height) {
            throw Error(ErrorKind::out_of_range, "seed outside the Voronoi canvas");
        }
    }

    // Bucket seeds on a coarse grid and search rings outward; the search stops
    // only once no unvisited bucket can hold a seed at distance <= best.
    const double area = static_cast<double>(width) * height;
    const int cell = std::max(1, static_cast<int>(std::ceil(std::sqrt(area / static_cast<double>(seeds.size())))));
    const int nbx = (width + cell - 1) / cell;
    const int nby = (height + cell - 1) / cell;
    std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(nbx) * nby);
    for (std::uint32_t i = 0; i < seeds.size(); ++i) {
        buckets[static_cast<std::size_t>(seeds[i].y / cell) * nbx + seeds[i].x / cell].push_back(i);
    }
    const int max_ring = std::max(nbx, nby);

    LabelMap out(width, height, 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (mask && !(*mask)(x, y)) continue;
            const int bx = x / cell, by = y / cell;
            std::int64_t best_d = std::numeric_limits<std::int64_t>::max();
            std::uint32_t best_i = 0;
            for (int ring = 0; ring <= max_ring; ++ring) {
                if (ring > 0 && best_d != std::numeric_limits<std::int64_t>::max()) {
                    const std::int64_t bound = static_cast<std::int64_t>(ring - 1) * cell + 1;
                    if (bound * bound > best_d) break;
                }
                for (int cy = by - ring; cy <= by + ring; ++cy) {
                    if (cy < 0 || cy >= nby) continue;
                    const bool edge_row = cy == by - ring || cy == by + ring;
                    for (int cx = bx - ring; cx <= bx + ring; cx += (edge_row ? 1 : 2 * ring)) {
                        if (cx >= 0 && cx < nbx) {
                            for (auto i : buckets[static_cast<std::size_t>(cy) * nbx + cx]) {
                                const std::int64_t dx = seeds[i].x - x, dy = seeds[i].y - y;
                                const std::int64_t d = dx * dx + dy * dy;
                                if (d < best_d || (d == best_d && i < best_i)) {
                                    best_d = d;
                                    best_i = i;
                                }
                            }
                        }
                        if (ring == 0) break;
                    }
                }
            }
            out(x, y) = best_i + 1;
        }
    }
    return out;
}

VoronoiStages voronoi_stages(const GrayImage& hillshade8, const VoronoiParams& params)
{
    params.validate();
    VoronoiStages st;
    st.blurred = gaussian_blur(hillshade8, params.sigma);
    st.candidates = detect_local_maxima(st.blurred, params.effective_peak_radius());

    const GrayImage requantized = requantize8(st.blurred);
    st.foreground = Mask(hillshade8.width, hillshade8.height, 0);
    const bool constant = std::all_of(requantized.data.begin(), requantized.data.end(),
                                      [&](std::uint8_t v) { return v == requantized.data.front(); });
    if (constant) {
        // No valid split: nothing is foreground.
        st.threshold = requantized.data.empty() ? 0 : requantized.data.front();
    } else {
        auto otsu = otsu_threshold(requantized);
        st.threshold = otsu.threshold;
        st.foreground = std::move(otsu.mask);
        if (params.invert) {
            for (auto& m : st.foreground.data) m = !m;
        }
    }

    st.seeds = filter_background_seeds(st.candidates, st.foreground);
    if (st.seeds.empty()) {
        st.labels = LabelMap(hillshade8.width, hillshade8.height, 0);
    } else {
        st.labels = voronoi_label(st.seeds, hillshade8.width, hillshade8.height,
                                  params.restrict_to_foreground ? &st.foreground : nullptr);
    }
    return st;
}

LabelMap voronoi_pipeline(const GrayImage& hillshade8, const VoronoiParams& params)
{
    return voronoi_stages(hillshade8, params).labels;
}

} // namespace spoilseg::morph
