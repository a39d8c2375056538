// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#include "spoilseg/colorseg.hpp"
#include "spoilseg/harness.hpp"
#include "spoilseg/hoover.hpp"
#include "spoilseg/morphseg.hpp"
#include "spoilseg/raster.hpp"
#include "spoilseg/terrain.hpp"
#include "support.hpp"

using namespace spoilseg;
using support::Rng;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

hoover::HooverScores tallied_scores(const hoover::HooverClassification& c, const hoover::OverlapTable& t, double T)
{
    const auto s = hoover::hoover_scores(c, static_cast<std::int64_t>(t.gt_sizes.size()),
                                         static_cast<std::int64_t>(t.ms_sizes.size()), T);
    support::tally().record(s);
    return s;
}

Outcome hoover_oracle()
{
    Outcome o;
    Rng rng(1001);
    const auto t0 = Clock::now();
    long instances = 0, mismatches = 0;
    for (int i = 0; i < 1200; ++i) {
        const auto [gt, ms] = support::hoover_instance(rng);
        const auto table = hoover::overlap_table(gt, ms);
        for (double T : {0.5, 0.51, 0.8}) {
            const auto fast = hoover::hoover_classify(table, T);
            if (!(fast == hoover::hoover_bruteforce(table, T))) ++mismatches;
            if (!table.gt_sizes.empty()) tallied_scores(fast, table, T);
            ++instances;
        }
    }
    const double secs = seconds_since(t0);
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.require(secs < 10.0, "runtime " + fmt("%.2f", secs) + " s");
    if (o.pass) o.detail = std::to_string(instances) + " instances agree in " + fmt("%.2f", secs) + " s";
    return o;
}

Outcome otsu_exhaustive()
{
    Outcome o;
    Rng rng(1003);
    int agree = 0;
    for (int i = 0; i < 100; ++i) {
        const int w = rng.uniform_int(4, 64), h = rng.uniform_int(4, 64);
        const int lo = rng.uniform_int(0, 200);
        auto img = support::random_gray(rng, w, h, lo, rng.uniform_int(lo + 1, 255));
        if (i % 2) {
            // Clustered histograms exercise plateaus in the variance curve.
            for (auto& v : img.data) v = static_cast<std::uint8_t>(v / 32 * 32);
            img.data[0] = 0;
            img.data[1] = 224;
        }
        if (morph::otsu_threshold(img).threshold == support::otsu_oracle(img)) ++agree;
    }
    o.require(agree == 100, std::to_string(100 - agree) + " disagreements");
    if (o.pass) o.detail = "100 images agree with the exhaustive rational scan";
    return o;
}

Outcome voronoi_bruteforce()
{
    Outcome o;
    Rng rng(1004);
    int agree = 0;
    long tie_pixels = 0;
    for (int i = 0; i < 50; ++i) {
        const auto seeds = support::tie_heavy_seeds(rng, 64, 64, rng.uniform_int(2, 40));
        if (morph::voronoi_label(seeds, 64, 64) == support::voronoi_oracle(seeds, 64, 64)) ++agree;
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                long best = -1;
                int hits = 0;
                for (const auto& s : seeds) {
                    const long d = (s.x - x) * (s.x - x) + (s.y - y) * (s.y - y);
                    if (best < 0 || d < best) {
                        best = d;
                        hits = 1;
                    } else if (d == best) {
                        ++hits;
                    }
                }
                tie_pixels += hits > 1;
            }
        }
    }
    o.require(agree == 50, std::to_string(50 - agree) + " seed sets disagree");
    o.require(tie_pixels > 0, "no tie pixels exercised");
    if (o.pass) o.detail = "50 seed sets agree, " + std::to_string(tie_pixels) + " tie pixels";
    return o;
}

harness::SweepReport sigma_sweep(unsigned threads)
{
    const auto field = harness::synth_pilefield(300, 300, 9, 8.0, 42);
    harness::SweepData data;
    data.hillshade = harness::relief8(field.dsm);
    data.ground_truth = field.gt;
    harness::SweepConfig cfg;
    cfg.algorithm = harness::Algorithm::voronoi;
    cfg.grid = {{"sigma", {1.0, 12.0, 60.0}}};
    return harness::run_sweep(cfg, data, threads);
}

Outcome synthetic_sweep()
{
    Outcome o;
    const auto t0 = Clock::now();
    const auto report = sigma_sweep(0);
    const double secs = seconds_since(t0);
    if (report.rows.size() != 3 || !report.optimum) {
        o.require(false, "sweep did not produce three rows and an optimum");
        return o;
    }
    for (const auto& row : report.rows) {
        if (!row.scores) {
            o.require(false, "row failed: " + row.error);
            return o;
        }
        support::tally().record(*row.scores);
    }
    const auto cd = [&](std::size_t i) { return report.rows[i].scores->correct_detection.value(); };
    o.require(*report.optimum == 1, "optimum is row " + std::to_string(*report.optimum));
    o.require(cd(1) >= 0.9, "correct at sigma 12 is " + fmt("%.3f", cd(1)));
    o.require(cd(0) < 0.9, "correct at sigma 1 is " + fmt("%.3f", cd(0)));
    o.require(cd(2) < 0.9, "correct at sigma 60 is " + fmt("%.3f", cd(2)));
    const auto& s60 = *report.rows[2].scores;
    o.require(s60.under_segmentation.num > 0, "under at sigma 60 is " + fmt("%.3f", s60.under_segmentation.value()) +
                                                  " (missed " + fmt("%.3f", s60.missed.value()) + ")");
    o.require(secs < 30.0, "runtime " + fmt("%.2f", secs) + " s");
    const auto summary = "correct at sigma 1/12/60 = " + fmt("%.3f", cd(0)) + " / " + fmt("%.3f", cd(1)) + " / " +
                         fmt("%.3f", cd(2)) + ", " + fmt("%.2f", secs) + " s";
    o.detail = o.pass ? "optimum sigma 12, " + summary : o.detail + "; " + summary;
    return o;
}

Outcome slic_structure()
{
    Outcome o;
    const auto lab = colorseg::rgb_to_lab(RasterRGB(100, 100, Rgb{90, 140, 60}));
    colorseg::SlicParams p;
    p.superpixels = 100;
    p.compactness = 10;
    const auto labels = colorseg::slic(lab, p);
    const auto k = positive_labels(labels).size();
    const double mean_area = 10000.0 / static_cast<double>(k);
    o.require(support::all_regions_connected(labels), "disconnected region");
    o.require(k >= 50 && k <= 200, "region count " + std::to_string(k));
    o.require(mean_area >= 50.0 && mean_area <= 150.0, "mean area " + fmt("%.1f", mean_area));

    Rng rng(1006);
    const auto small = colorseg::rgb_to_lab(support::random_rgb(rng, 32, 32));
    const int step = colorseg::slic_step(32, 32, 16);
    auto centers = colorseg::slic_seed_centers(small, 16);
    // Perturb the seeded centers so the check is not limited to grid positions.
    for (auto& c : centers) {
        c.x = std::clamp(c.x + rng.uniform(-2, 2), 0.0, 31.0);
        c.y = std::clamp(c.y + rng.uniform(-2, 2), 0.0, 31.0);
        c.L += rng.uniform(-10, 10);
    }
    const bool same = colorseg::slic_assign(small, centers, step, 10.0) ==
                      support::slic_assign_oracle(small, centers, step, 10.0);
    o.require(same, "assignment differs from exhaustive search");
    if (o.pass) o.detail = std::to_string(k) + " connected regions, mean area " + fmt("%.1f", mean_area) +
                           ", 32x32 assignment matches";
    return o;
}

Outcome meanshift_degenerate()
{
    Outcome o;
    colorseg::MeanShiftParams p;
    p.spatial_radius = 3;
    p.range_radius = 20;

    p.min_region_size = 10;
    const auto flat = colorseg::mean_shift_segment(RasterRGB(24, 24, Rgb{50, 60, 70}), p);
    o.require(positive_labels(flat).size() == 1, "constant image gave " + std::to_string(positive_labels(flat).size()));

    RasterRGB halves(30, 20);
    for (int y = 0; y < 20; ++y) {
        for (int x = 0; x < 30; ++x) halves(x, y) = x < 15 ? Rgb{30, 30, 30} : Rgb{150, 150, 150};
    }
    p.min_region_size = 250;
    const auto two = colorseg::mean_shift_segment(halves, p);
    bool split = positive_labels(two).size() == 2;
    for (int y = 0; y < 20 && split; ++y) {
        for (int x = 0; x < 30; ++x) split = split && two(x, y) == (x < 15 ? 1u : 2u);
    }
    o.require(split, "two-tone image did not split into its halves");

    RasterRGB speck(20, 20, Rgb{100, 100, 100});
    speck(5, 5) = speck(6, 5) = speck(6, 6) = Rgb{255, 0, 0};
    p.min_region_size = 10;
    const auto absorbed = colorseg::mean_shift_segment(speck, p);
    o.require(positive_labels(absorbed).size() == 1, "speck survived");
    if (o.pass) o.detail = "constant 1 region, halves 2 regions, speck absorbed";
    return o;
}

Outcome hillshade_analytics()
{
    Outcome o;
    ScalarGrid flat(16, 12, 250.0);
    flat.cellsize = 0.5;
    const auto out = terrain::hillshade(flat, {315.0, 45.0, 1.0});
    double worst = 0.0;
    for (int y = 1; y < 11; ++y) {
        for (int x = 1; x < 15; ++x) worst = std::max(worst, std::abs(out(x, y) - std::sin(M_PI / 4.0)));
    }
    o.require(worst <= 1e-9, "flat error " + fmt("%.3g", worst));

    Rng rng(1008);
    double drift = 0.0;
    for (int t = 0; t < 20; ++t) {
        ScalarGrid dsm(rng.uniform_int(3, 30), rng.uniform_int(3, 30));
        for (auto& v : dsm.data) v = rng.uniform(0.0, 20.0);
        const terrain::HillshadeParams hp{rng.uniform(0.0, 359.0), rng.uniform(5.0, 85.0), 1.0};
        auto lifted = dsm;
        const double c = rng.uniform(-500.0, 500.0);
        for (auto& v : lifted.data) v += c;
        const auto a = terrain::hillshade(dsm, hp), b = terrain::hillshade(lifted, hp);
        for (std::size_t i = 0; i < a.size(); ++i) drift = std::max(drift, std::abs(a.data[i] - b.data[i]));
    }
    o.require(drift <= 1e-9, "offset drift " + fmt("%.3g", drift));
    if (o.pass) o.detail = "flat error " + fmt("%.2g", worst) + ", offset drift " + fmt("%.2g", drift);
    return o;
}

Outcome format_round_trips()
{
    Outcome o;
    Rng rng(1009);
    int bad = 0;
    for (int t = 0; t < 100; ++t) {
        const auto img = support::random_rgb(rng, rng.uniform_int(1, 50), rng.uniform_int(1, 50));
        const auto bytes = io::encode_ppm(img);
        if (!(io::decode_ppm(bytes) == img) || io::encode_ppm(io::decode_ppm(bytes)) != bytes) ++bad;

        const auto labels = support::noise_labels(rng, rng.uniform_int(1, 50), rng.uniform_int(1, 50), 65535, 0.1);
        const auto lbytes = io::encode_pgm16(labels);
        if (!(io::decode_pgm16(lbytes) == labels) || io::encode_pgm16(io::decode_pgm16(lbytes)) != lbytes) ++bad;

        ScalarGrid g(rng.uniform_int(1, 30), rng.uniform_int(1, 30));
        g.cellsize = rng.uniform(0.01, 5.0);
        for (auto& v : g.data) v = std::ldexp(rng.uniform(-1.0, 1.0), rng.uniform_int(-40, 40));
        if (rng.coin()) {
            g.nodata = -9999.0;
            g.data[0] = -9999.0;
        }
        const auto back = io::decode_asc_grid(io::encode_asc_grid(g));
        const bool exact = back.same_shape(g) && back.cellsize == g.cellsize && back.nodata == g.nodata &&
                           std::memcmp(back.data.data(), g.data.data(), g.size() * sizeof(double)) == 0;
        if (!exact) ++bad;
    }
    o.require(bad == 0, std::to_string(bad) + " round trips differ");
    if (o.pass) o.detail = "100 each of PPM, PGM16, ASC bit-exact";
    return o;
}

Outcome sweep_determinism()
{
    Outcome o;
    const auto a = sigma_sweep(0);
    const auto b = sigma_sweep(1);
    for (const auto* r : {&a, &b}) {
        for (const auto& row : r->rows) {
            if (row.scores) support::tally().record(*row.scores);
        }
    }
    o.require(harness::render_csv(a) == harness::render_csv(b), "CSV differs");
    o.require(harness::render_json(a) == harness::render_json(b), "JSON differs");
    if (o.pass) o.detail = "CSV and JSON byte-identical across thread counts";
    return o;
}

Outcome decomposition()
{
    Outcome o;
    const auto& t = support::tally();
    o.require(t.evaluations > 0, "no evaluations recorded");
    o.require(t.violations == 0, std::to_string(t.violations) + " violations");
    if (o.pass) o.detail = std::to_string(t.evaluations) + " evaluations sum to one exactly";
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    // Decomposition is checked last so it covers every evaluation above it.
    const Criterion criteria[] = {
        {1, "Hoover oracle equivalence", hoover_oracle},
        {3, "Otsu exhaustive agreement", otsu_exhaustive},
        {4, "Voronoi brute-force agreement", voronoi_bruteforce},
        {5, "synthetic sigma sweep", synthetic_sweep},
        {6, "SLIC structure", slic_structure},
        {7, "mean shift degenerate suite", meanshift_degenerate},
        {8, "hillshade analytics", hillshade_analytics},
        {9, "format round trips", format_round_trips},
        {10, "sweep determinism", sweep_determinism},
        {2, "score decomposition", decomposition},
    };
    Outcome results[11];
    for (const auto& c : criteria) {
        try {
            results[c.id] = c.run();
        } catch (const std::exception& e) {
            results[c.id] = {false, std::string("exception: ") + e.what()};
        }
    }
    int failed = 0;
    for (int id = 1; id <= 10; ++id) {
        const char* name = "";
        for (const auto& c : criteria) {
            if (c.id == id) name = c.name;
        }
        const auto& r = results[id];
        std::printf("criterion %2d %s: %s (%s)\n", id, r.pass ? "PASS" : "FAIL", name, r.detail.c_str());
        failed += !r.pass;
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
