#include "spoilseg/hoover.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace spoilseg::hoover {

std::int64_t OverlapTable::overlap(RegionId gt, RegionId ms) const
{
    const auto it = overlaps.find({gt, ms});
    return it == overlaps.end() ? 0 : it->second;
}

bool HooverScores::decomposition_exact() const
{
    return counts.n_gt > 0 && correct_detection.den == counts.n_gt && over_segmentation.den == counts.n_gt &&
           under_segmentation.den == counts.n_gt && missed.den == counts.n_gt &&
           correct_detection.num + over_segmentation.num + under_segmentation.num + missed.num == counts.n_gt;
}

double HooverScores::correct_plus_over() const
{
    return static_cast<double>(correct_detection.num + over_segmentation.num) / static_cast<double>(counts.n_gt);
}

OverlapTable overlap_table(const LabelMap& gt, const LabelMap& ms)
{
    if (!gt.same_shape(ms)) {
        throw Error(ErrorKind::dimension_mismatch, "ground truth and machine segmentation differ in size");
    }
    OverlapTable t;
    std::unordered_map<std::uint64_t, std::int64_t> pairs;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const auto g = gt.data[i];
        const auto m = ms.data[i];
        if (g != 0) ++t.gt_sizes[g];
        if (m != 0) ++t.ms_sizes[m];
        if (g != 0 && m != 0) ++pairs[(static_cast<std::uint64_t>(g) << 32) | m];
    }
    for (const auto& [key, count] : pairs) {
        t.overlaps.emplace(std::pair{static_cast<RegionId>(key >> 32), static_cast<RegionId>(key & 0xffffffffu)},
                           count);
    }
    return t;
}

namespace {

void require_threshold(double threshold)
{
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "Hoover threshold must lie in (0, 1]");
    }
}

} // namespace

HooverClassification hoover_classify(const OverlapTable& table, double threshold)
{
    require_threshold(threshold);
    HooverClassification out;
    std::set<RegionId> free_gt, free_ms;
    for (const auto& [id, size] : table.gt_sizes) free_gt.insert(id);
    for (const auto& [id, size] : table.ms_sizes) free_ms.insert(id);

    // Correct detections.
    struct Candidate {
        std::int64_t overlap;
        RegionId gt, ms;
    };
    std::vector<Candidate> candidates;
    for (const auto& [key, ov] : table.overlaps) {
        const auto [g, m] = key;
        if (meets_threshold(ov, table.gt_sizes.at(g), threshold) && meets_threshold(ov, table.ms_sizes.at(m), threshold)) {
            candidates.push_back({ov, g, m});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        if (a.gt != b.gt) return a.gt < b.gt;
        return a.ms < b.ms;
    });
    for (const auto& c : candidates) {
        if (!free_gt.count(c.gt) || !free_ms.count(c.ms)) continue;
        free_gt.erase(c.gt);
        free_ms.erase(c.ms);
        out.correct.emplace_back(c.gt, c.ms);
    }

    // Over-segmentation: one gt region split across several ms regions.
    for (const auto g : std::vector<RegionId>(free_gt.begin(), free_gt.end())) {
        std::vector<RegionId> parts;
        std::int64_t total = 0;
        for (const auto m : free_ms) {
            const auto ov = table.overlap(g, m);
            if (ov > 0 && meets_threshold(ov, table.ms_sizes.at(m), threshold)) {
                parts.push_back(m);
                total += ov;
            }
        }
        if (parts.size() >= 2 && meets_threshold(total, table.gt_sizes.at(g), threshold)) {
            free_gt.erase(g);
            for (auto m : parts) free_ms.erase(m);
            out.over.push_back({g, std::move(parts)});
        }
    }

    // Under-segmentation: one ms region covering several gt regions.
    for (const auto m : std::vector<RegionId>(free_ms.begin(), free_ms.end())) {
        std::vector<RegionId> parts;
        std::int64_t total = 0;
        for (const auto g : free_gt) {
            const auto ov = table.overlap(g, m);
            if (ov > 0 && meets_threshold(ov, table.gt_sizes.at(g), threshold)) {
                parts.push_back(g);
                total += ov;
            }
        }
        if (parts.size() >= 2 && meets_threshold(total, table.ms_sizes.at(m), threshold)) {
            free_ms.erase(m);
            for (auto g : parts) free_gt.erase(g);
            out.under.push_back({m, std::move(parts)});
        }
    }

    out.missed.assign(free_gt.begin(), free_gt.end());
    out.noise.assign(free_ms.begin(), free_ms.end());
    std::sort(out.correct.begin(), out.correct.end());
    return out;
}

HooverClassification hoover_bruteforce(const OverlapTable& table, double threshold)
{
    require_threshold(threshold);
    constexpr std::size_t kMax = 6;
    if (table.gt_sizes.size() > kMax || table.ms_sizes.size() > kMax) {
        throw Error(ErrorKind::instance_too_large, "brute-force Hoover oracle handles at most 6 regions per side");
    }
    const std::vector<std::pair<RegionId, std::int64_t>> gts(table.gt_sizes.begin(), table.gt_sizes.end());
    const std::vector<std::pair<RegionId, std::int64_t>> mss(table.ms_sizes.begin(), table.ms_sizes.end());
    const std::size_t ng = gts.size(), nm = mss.size();

    std::int64_t ov[kMax][kMax] = {};
    for (std::size_t i = 0; i < ng; ++i) {
        for (std::size_t j = 0; j < nm; ++j) ov[i][j] = table.overlap(gts[i].first, mss[j].first);
    }

    unsigned used_g = 0, used_m = 0;
    HooverClassification out;

    // Correct: repeatedly take the best remaining qualifying pair.
    for (;;) {
        int bi = -1, bj = -1;
        for (std::size_t i = 0; i < ng; ++i) {
            if (used_g >> i & 1u) continue;
            for (std::size_t j = 0; j < nm; ++j) {
                if (used_m >> j & 1u) continue;
                const auto o = ov[i][j];
                if (o == 0 || !meets_threshold(o, gts[i].second, threshold) ||
                    !meets_threshold(o, mss[j].second, threshold)) {
                    continue;
                }
                // ids ascend with the index, so index order breaks ties.
                if (bi < 0 || o > ov[bi][bj]) {
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        }
        if (bi < 0) break;
        used_g |= 1u << bi;
        used_m |= 1u << bj;
        out.correct.emplace_back(gts[static_cast<std::size_t>(bi)].first, mss[static_cast<std::size_t>(bj)].first);
    }

    // Largest valid subset of free partners, or none.
    auto best_subset = [&](std::size_t n_partners, unsigned used_partners, auto&& member_ok, auto&& overlap_of,
                           std::int64_t own_size) {
        unsigned best = 0;
        int best_bits = 0;
        for (unsigned s = 1; s < (1u << n_partners); ++s) {
            if (s & used_partners) continue;
            const int bits = __builtin_popcount(s);
            if (bits < 2) continue;
            std::int64_t sum = 0;
            bool ok = true;
            for (std::size_t k = 0; k < n_partners && ok; ++k) {
                if (!(s >> k & 1u)) continue;
                ok = member_ok(k);
                sum += overlap_of(k);
            }
            if (!ok || !meets_threshold(sum, own_size, threshold)) continue;
            if (bits > best_bits) {
                best = s;
                best_bits = bits;
            }
        }
        return best;
    };

    for (std::size_t i = 0; i < ng; ++i) {
        if (used_g >> i & 1u) continue;
        const unsigned s = best_subset(
            nm, used_m,
            [&](std::size_t j) { return ov[i][j] > 0 && meets_threshold(ov[i][j], mss[j].second, threshold); },
            [&](std::size_t j) { return ov[i][j]; }, gts[i].second);
        if (s == 0) continue;
        used_g |= 1u << i;
        used_m |= s;
        OverInstance inst{gts[i].first, {}};
        for (std::size_t j = 0; j < nm; ++j) {
            if (s >> j & 1u) inst.ms.push_back(mss[j].first);
        }
        out.over.push_back(std::move(inst));
    }

    for (std::size_t j = 0; j < nm; ++j) {
        if (used_m >> j & 1u) continue;
        const unsigned s = best_subset(
            ng, used_g,
            [&](std::size_t i) { return ov[i][j] > 0 && meets_threshold(ov[i][j], gts[i].second, threshold); },
            [&](std::size_t i) { return ov[i][j]; }, mss[j].second);
        if (s == 0) continue;
        used_m |= 1u << j;
        used_g |= s;
        UnderInstance inst{mss[j].first, {}};
        for (std::size_t i = 0; i < ng; ++i) {
            if (s >> i & 1u) inst.gt.push_back(gts[i].first);
        }
        out.under.push_back(std::move(inst));
    }

    for (std::size_t i = 0; i < ng; ++i) {
        if (!(used_g >> i & 1u)) out.missed.push_back(gts[i].first);
    }
    for (std::size_t j = 0; j < nm; ++j) {
        if (!(used_m >> j & 1u)) out.noise.push_back(mss[j].first);
    }
    std::sort(out.correct.begin(), out.correct.end());
    return out;
}

HooverScores hoover_scores(const HooverClassification& c, std::int64_t n_gt, std::int64_t n_ms, double threshold)
{
    require_threshold(threshold);
    if (n_gt <= 0) throw Error(ErrorKind::degenerate_input, "ground truth has no regions");

    HooverCounts k;
    k.n_gt = n_gt;
    k.n_ms = n_ms;
    k.correct = static_cast<std::int64_t>(c.correct.size());
    k.over_instances = static_cast<std::int64_t>(c.over.size());
    k.over_gt = k.over_instances;
    for (const auto& o : c.over) k.over_ms += static_cast<std::int64_t>(o.ms.size());
    k.under_instances = static_cast<std::int64_t>(c.under.size());
    k.under_ms = k.under_instances;
    for (const auto& u : c.under) k.under_gt += static_cast<std::int64_t>(u.gt.size());
    k.missed = static_cast<std::int64_t>(c.missed.size());
    k.noise = static_cast<std::int64_t>(c.noise.size());

    if (k.correct + k.over_gt + k.under_gt + k.missed != n_gt) {
        throw Error(ErrorKind::invalid_argument, "classification does not account for every ground-truth region");
    }
    if (k.correct + k.over_ms + k.under_ms + k.noise != n_ms) {
        throw Error(ErrorKind::invalid_argument, "classification does not account for every machine region");
    }

    HooverScores s;
    s.threshold = threshold;
    s.counts = k;
    s.correct_detection = {k.correct, n_gt};
    s.over_segmentation = {k.over_gt, n_gt};
    s.under_segmentation = {k.under_gt, n_gt};
    s.missed = {k.missed, n_gt};
    s.noise = n_ms > 0 ? Fraction{k.noise, n_ms} : Fraction{0, 1};
    return s;
}

Evaluation evaluate(const LabelMap& gt, const LabelMap& ms, double threshold)
{
    Evaluation e;
    e.table = overlap_table(gt, ms);
    e.classification = hoover_classify(e.table, threshold);
    e.scores = hoover_scores(e.classification, static_cast<std::int64_t>(e.table.gt_sizes.size()),
                             static_cast<std::int64_t>(e.table.ms_sizes.size()), threshold);
    return e;
}

} // namespace spoilseg::hoover
