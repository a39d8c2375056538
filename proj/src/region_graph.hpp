#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "spoilseg/raster.hpp"

namespace spoilseg::detail {

// Region adjacency graph over a component map whose labels are 1..n.
// Boundary weights count 4-adjacent pixel pairs. Merging keeps the id of the
// absorbing region.
struct RegionGraph {
    std::vector<std::int64_t> size;                          // by id, [0] unused
    std::vector<std::array<double, 3>> colour_sum;           // by id
    std::vector<std::map<std::uint32_t, std::int64_t>> boundary;
    std::vector<std::uint32_t> merged_into;                  // by id, self when alive

    explicit RegionGraph(const LabelMap& components)
    {
        std::uint32_t n = 0;
        for (auto v : components.data) n = std::max(n, v);
        size.assign(n + 1, 0);
        colour_sum.assign(n + 1, {0.0, 0.0, 0.0});
        boundary.resize(n + 1);
        merged_into.resize(n + 1);
        std::iota(merged_into.begin(), merged_into.end(), 0u);
        for (int y = 0; y < components.height; ++y) {
            for (int x = 0; x < components.width; ++x) {
                const auto a = components(x, y);
                if (a == 0) continue;
                ++size[a];
                if (x + 1 < components.width) link(a, components(x + 1, y));
                if (y + 1 < components.height) link(a, components(x, y + 1));
            }
        }
    }

    std::uint32_t region_count() const { return static_cast<std::uint32_t>(size.size() - 1); }

    void merge(std::uint32_t from, std::uint32_t into)
    {
        size[into] += size[from];
        for (int c = 0; c < 3; ++c) colour_sum[into][c] += colour_sum[from][c];
        for (const auto& [nb, count] : boundary[from]) {
            boundary[nb].erase(from);
            if (nb == into) continue;
            boundary[into][nb] += count;
            boundary[nb][into] += count;
        }
        boundary[into].erase(from);
        boundary[from].clear();
        size[from] = 0;
        merged_into[from] = into;
    }

    std::uint32_t resolve(std::uint32_t id)
    {
        auto root = id;
        while (merged_into[root] != root) root = merged_into[root];
        while (merged_into[id] != root) {
            const auto next = merged_into[id];
            merged_into[id] = root;
            id = next;
        }
        return root;
    }

    LabelMap apply(const LabelMap& components)
    {
        LabelMap out = components;
        for (auto& v : out.data) {
            if (v != 0) v = resolve(v);
        }
        return out;
    }

private:
    void link(std::uint32_t a, std::uint32_t b)
    {
        if (b == 0 || a == b) return;
        ++boundary[a][b];
        ++boundary[b][a];
    }
};

} // namespace spoilseg::detail
