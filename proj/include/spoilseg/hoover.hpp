#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "spoilseg/raster.hpp"

namespace spoilseg::hoover {

using RegionId = std::uint32_t;

/// Pixel-overlap contingency table; label 0 is excluded on both sides.
struct OverlapTable {
    std::map<RegionId, std::int64_t> gt_sizes;
    std::map<RegionId, std::int64_t> ms_sizes;
    std::map<std::pair<RegionId, RegionId>, std::int64_t> overlaps;  // (gt, ms) -> pixels

    std::int64_t overlap(RegionId gt, RegionId ms) const;
    bool operator==(const OverlapTable&) const = default;
};

struct OverInstance {
    RegionId gt = 0;
    std::vector<RegionId> ms;  // ascending, size >= 2

    bool operator==(const OverInstance&) const = default;
};

struct UnderInstance {
    RegionId ms = 0;
    std::vector<RegionId> gt;  // ascending, size >= 2

    bool operator==(const UnderInstance&) const = default;
};

/// Canonical form: every list sorted ascending by its leading id.
struct HooverClassification {
    std::vector<std::pair<RegionId, RegionId>> correct;  // (gt, ms)
    std::vector<OverInstance> over;
    std::vector<UnderInstance> under;
    std::vector<RegionId> missed;
    std::vector<RegionId> noise;

    bool operator==(const HooverClassification&) const = default;
};

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Fraction&) const = default;
};

struct HooverCounts {
    std::int64_t n_gt = 0;
    std::int64_t n_ms = 0;
    std::int64_t correct = 0;        // correct pairs
    std::int64_t over_instances = 0;
    std::int64_t over_gt = 0;        // gt regions that are over-segmented
    std::int64_t over_ms = 0;        // ms regions taking part in over instances
    std::int64_t under_instances = 0;
    std::int64_t under_gt = 0;       // gt regions taking part in under instances
    std::int64_t under_ms = 0;       // ms regions that under-segment
    std::int64_t missed = 0;
    std::int64_t noise = 0;

    bool operator==(const HooverCounts&) const = default;
};

/// Correct, over, under and missed are fractions of ground-truth regions;
/// noise is a fraction of machine regions.
struct HooverScores {
    double threshold = 0.5;
    HooverCounts counts;
    Fraction correct_detection;
    Fraction over_segmentation;
    Fraction under_segmentation;
    Fraction missed;
    Fraction noise;

    /// correct + over + under + missed == 1, checked on the integer numerators.
    bool decomposition_exact() const;
    double correct_plus_over() const;
    bool operator==(const HooverScores&) const = default;
};

struct Evaluation {
    OverlapTable table;
    HooverClassification classification;
    HooverScores scores;
};

/// overlap >= T * size, the comparison used by every category test.
inline bool meets_threshold(std::int64_t overlap, std::int64_t size, double threshold)
{
    return static_cast<double>(overlap) >= threshold * static_cast<double>(size);
}

OverlapTable overlap_table(const LabelMap& gt, const LabelMap& ms);

/// Greedy Hoover classification: correct pairs by decreasing overlap, then
/// over-segmentation by ascending gt id, then under-segmentation by ascending
/// ms id; leftovers are missed (gt) or noise (ms). T must lie in (0, 1].
HooverClassification hoover_classify(const OverlapTable& table, double threshold);

/// Subset-enumeration oracle for tables with at most 6 regions per side.
HooverClassification hoover_bruteforce(const OverlapTable& table, double threshold);

HooverScores hoover_scores(const HooverClassification& c, std::int64_t n_gt, std::int64_t n_ms, double threshold);

Evaluation evaluate(const LabelMap& gt, const LabelMap& ms, double threshold = 0.5);

} // namespace spoilseg::hoover
