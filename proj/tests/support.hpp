#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <gmpxx.h>

#include "spoilseg/colorseg.hpp"
#include "spoilseg/hoover.hpp"
#include "spoilseg/morphseg.hpp"
#include "spoilseg/raster.hpp"

namespace support {

using namespace spoilseg;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    int uniform_int(int lo, int hi)
    {
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[eng_() % i]);
    }

private:
    std::mt19937_64 eng_;
};

inline RasterRGB random_rgb(Rng& rng, int w, int h)
{
    RasterRGB img(w, h);
    for (auto& px : img.data) {
        px = {static_cast<std::uint8_t>(rng.uniform_int(0, 255)), static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
              static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
    }
    return img;
}

inline GrayImage random_gray(Rng& rng, int w, int h, int lo = 0, int hi = 255)
{
    GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
    return img;
}

/// Labels drawn independently per pixel.
inline LabelMap noise_labels(Rng& rng, int w, int h, int max_label, double background = 0.0)
{
    LabelMap m(w, h);
    for (auto& v : m.data) v = rng.coin(background) ? 0u : static_cast<std::uint32_t>(rng.uniform_int(1, max_label));
    return m;
}

/// Overlapping random rectangles painted in sequence: blocky regions with
/// shared boundaries, closer to real segmentations than per-pixel noise.
inline LabelMap blocky_labels(Rng& rng, int w, int h, int max_label, int rects, bool background = true)
{
    LabelMap m(w, h, background ? 0u : 1u);
    for (int r = 0; r < rects; ++r) {
        const int x0 = rng.uniform_int(0, w - 1), y0 = rng.uniform_int(0, h - 1);
        const int x1 = rng.uniform_int(x0, w - 1), y1 = rng.uniform_int(y0, h - 1);
        const auto label = static_cast<std::uint32_t>(rng.uniform_int(background ? 0 : 1, max_label));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) m(x, y) = label;
        }
    }
    return m;
}

/// Derives a machine map from a ground-truth map by splitting regions along
/// a random cut, merging random pairs and perturbing a few pixels, so over
/// and under cases appear often.
inline LabelMap perturbed_labels(Rng& rng, const LabelMap& gt, int max_label)
{
    LabelMap ms = gt;
    std::vector<std::uint32_t> remap(static_cast<std::size_t>(max_label) + 1);
    std::iota(remap.begin(), remap.end(), 0u);
    for (std::size_t i = 1; i < remap.size(); ++i) {
        if (rng.coin(0.3)) remap[i] = static_cast<std::uint32_t>(rng.uniform_int(1, max_label));
    }
    const bool vertical = rng.coin();
    const int cut = rng.uniform_int(0, vertical ? gt.width : gt.height);
    const auto split_label = static_cast<std::uint32_t>(rng.uniform_int(1, max_label));
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            auto& v = ms(x, y);
            if (v == 0) {
                if (rng.coin(0.05)) v = static_cast<std::uint32_t>(rng.uniform_int(1, max_label));
                continue;
            }
            v = remap[v];
            if ((vertical ? x : y) >= cut && rng.coin(0.8)) v = split_label;
            if (rng.coin(0.05)) v = static_cast<std::uint32_t>(rng.uniform_int(0, max_label));
        }
    }
    return ms;
}

inline LabelMap permute_labels(Rng& rng, const LabelMap& m)
{
    std::uint32_t top = 0;
    for (auto v : m.data) top = std::max(top, v);
    std::vector<std::uint32_t> perm(top);
    std::iota(perm.begin(), perm.end(), 1u);
    rng.shuffle(perm);
    // Spread ids out as well, so the permutation is not just a reshuffle of 1..n.
    LabelMap out = m;
    for (auto& v : out.data) {
        if (v != 0) v = perm[v - 1] * 7 + 3;
    }
    return out;
}

/// Small gt/ms pair with at most six labels per side. Small canvases make
/// exact threshold boundaries and overlap ties common.
inline std::pair<LabelMap, LabelMap> hoover_instance(Rng& rng)
{
    const int w = rng.uniform_int(2, 12), h = rng.uniform_int(2, 12);
    const int kinds = rng.uniform_int(0, 2);
    LabelMap gt = kinds == 0 ? noise_labels(rng, w, h, 6, 0.1) : blocky_labels(rng, w, h, 6, rng.uniform_int(1, 8));
    LabelMap ms = kinds == 2 ? blocky_labels(rng, w, h, 6, rng.uniform_int(1, 8)) : perturbed_labels(rng, gt, 6);
    return {std::move(gt), std::move(ms)};
}

/// Independent overlap tally straight from the pixels.
inline hoover::OverlapTable brute_overlap(const LabelMap& gt, const LabelMap& ms)
{
    hoover::OverlapTable t;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            const auto g = gt(x, y), m = ms(x, y);
            if (g) t.gt_sizes[g] += 1;
            if (m) t.ms_sizes[m] += 1;
            if (g && m) t.overlaps[{g, m}] += 1;
        }
    }
    return t;
}

/// Union-find oracle for connected-component relabelling.
inline LabelMap brute_relabel(const LabelMap& map, bool eight)
{
    const auto n = map.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i];
        return i;
    };
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0)) continue;
                    if (!map.contains(x + dx, y + dy)) continue;
                    if (map(x, y) == 0 || map(x, y) != map(x + dx, y + dy)) continue;
                    const auto a = find(map.index(x, y)), b = find(map.index(x + dx, y + dy));
                    if (a != b) parent[a] = b;
                }
            }
        }
    }
    LabelMap out(map.width, map.height);
    std::map<std::size_t, std::uint32_t> names;
    for (std::size_t i = 0; i < n; ++i) {
        if (map.data[i] == 0) continue;
        const auto r = find(i);
        auto it = names.find(r);
        if (it == names.end()) it = names.emplace(r, static_cast<std::uint32_t>(names.size() + 1)).first;
        out.data[i] = it->second;
    }
    return out;
}

/// True when every positive label forms one 4-connected component.
inline bool all_regions_connected(const LabelMap& m)
{
    return positive_labels(m).size() == positive_labels(relabel_connected(m, Connectivity::four)).size();
}

/// Same partition (labels may differ): a bijection maps one labelling onto the other.
inline bool same_partition(const LabelMap& a, const LabelMap& b)
{
    if (!a.same_shape(b)) return false;
    std::map<std::uint32_t, std::uint32_t> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [it1, new1] = ab.emplace(a.data[i], b.data[i]);
        const auto [it2, new2] = ba.emplace(b.data[i], a.data[i]);
        if (it1->second != b.data[i] || it2->second != a.data[i]) return false;
    }
    return true;
}

/// Exhaustive Otsu in exact rationals: the weighted between-class variance
/// w0 w1 (mu0 - mu1)^2 for every split, smallest t among the maxima.
inline int otsu_oracle(const GrayImage& img)
{
    std::array<long, 256> hist{};
    for (auto v : img.data) ++hist[v];
    const mpq_class n(static_cast<long>(img.size()));
    int best_t = -1;
    mpq_class best;
    for (int t = 0; t < 255; ++t) {
        long n0 = 0, n1 = 0;
        mpz_class s0 = 0, s1 = 0;
        for (int i = 0; i < 256; ++i) {
            if (i <= t) {
                n0 += hist[static_cast<std::size_t>(i)];
                s0 += mpz_class(i) * hist[static_cast<std::size_t>(i)];
            } else {
                n1 += hist[static_cast<std::size_t>(i)];
                s1 += mpz_class(i) * hist[static_cast<std::size_t>(i)];
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const mpq_class w0 = mpq_class(n0) / n, w1 = mpq_class(n1) / n;
        const mpq_class mu0 = mpq_class(s0) / n0, mu1 = mpq_class(s1) / n1;
        const mpq_class var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (best_t < 0 || var > best) {
            best = var;
            best_t = t;
        }
    }
    return best_t;
}

/// Nearest seed by scanning all of them, ties to the lower index.
inline LabelMap voronoi_oracle(const morph::SeedSet& seeds, int w, int h, const Mask* mask = nullptr)
{
    LabelMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (mask && !(*mask)(x, y)) continue;
            long best = -1;
            std::uint32_t label = 0;
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                const long dx = seeds[i].x - x, dy = seeds[i].y - y;
                if (best < 0 || dx * dx + dy * dy < best) {
                    best = dx * dx + dy * dy;
                    label = static_cast<std::uint32_t>(i + 1);
                }
            }
            out(x, y) = label;
        }
    }
    return out;
}

/// Pixel-centric SLIC assignment: every center whose window reaches the
/// pixel is scored by D = sqrt(dlab^2 + (dxy / S)^2 m^2), lowest index on ties.
inline std::vector<int> slic_assign_oracle(const colorseg::LabImage& lab, const std::vector<colorseg::SlicCenter>& centers,
                                           double step, double m)
{
    std::vector<int> out(lab.size(), -1);
    for (int y = 0; y < lab.height; ++y) {
        for (int x = 0; x < lab.width; ++x) {
            double best_d = 0.0;
            for (std::size_t i = 0; i < centers.size(); ++i) {
                const auto& c = centers[i];
                if (std::abs(x - c.x) > step || std::abs(y - c.y) > step) continue;
                const auto& px = lab(x, y);
                const double dlab2 = (px.L - c.L) * (px.L - c.L) + (px.a - c.a) * (px.a - c.a) + (px.b - c.b) * (px.b - c.b);
                const double dxy = std::hypot(x - c.x, y - c.y);
                const double d = std::sqrt(dlab2 + (dxy / step) * (dxy / step) * m * m);
                auto& slot = out[lab.index(x, y)];
                if (slot < 0 || d < best_d) {
                    best_d = d;
                    slot = static_cast<int>(i);
                }
            }
        }
    }
    return out;
}

/// Random seed set with deliberate duplicates and mirror pairs, so that
/// equidistant pixels are common.
inline morph::SeedSet tie_heavy_seeds(Rng& rng, int w, int h, int count)
{
    morph::SeedSet seeds;
    while (static_cast<int>(seeds.size()) < count) {
        const int kind = rng.uniform_int(0, 3);
        if (kind == 0 && !seeds.empty()) {
            seeds.push_back(seeds[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(seeds.size()) - 1))]);
        } else if (kind == 1 && !seeds.empty()) {
            const auto& s = seeds.back();
            seeds.push_back({w - 1 - s.x, s.y, 0});
        } else {
            seeds.push_back({rng.uniform_int(0, w - 1), rng.uniform_int(0, h - 1), 0});
        }
    }
    return seeds;
}

/// Records every evaluation a test runs and whether its gt-side scores summed
/// to one exactly.
struct DecompositionTally {
    long evaluations = 0;
    long violations = 0;

    void record(const hoover::HooverScores& s)
    {
        ++evaluations;
        const auto& k = s.counts;
        const bool exact = s.decomposition_exact() && k.correct + k.over_gt + k.under_gt + k.missed == k.n_gt &&
                           k.correct + k.over_ms + k.under_ms + k.noise == k.n_ms;
        if (!exact) ++violations;
    }
};

inline DecompositionTally& tally()
{
    static DecompositionTally t;
    return t;
}

inline hoover::Evaluation checked_evaluate(const LabelMap& gt, const LabelMap& ms, double threshold)
{
    auto e = hoover::evaluate(gt, ms, threshold);
    tally().record(e.scores);
    return e;
}

} // namespace support
