#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "spoilseg/colorseg.hpp"
#include "spoilseg/harness.hpp"
#include "spoilseg/hoover.hpp"
#include "spoilseg/morphseg.hpp"
#include "spoilseg/raster.hpp"
#include "spoilseg/terrain.hpp"

namespace py = pybind11;
using namespace spoilseg;

namespace {

template <typename T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

void require_2d(const py::buffer_info& info, const char* what)
{
    if (info.ndim != 2) throw Error(ErrorKind::dimension_mismatch, std::string(what) + " must be a 2-D array");
}

template <typename T>
Grid<T> to_grid(const CArray<T>& a, const char* what)
{
    const auto info = a.request();
    require_2d(info, what);
    Grid<T> g(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]));
    std::memcpy(g.data.data(), info.ptr, g.size() * sizeof(T));
    return g;
}

template <typename T>
py::array_t<T> from_grid(const Grid<T>& g)
{
    py::array_t<T> out({g.height, g.width});
    std::memcpy(out.mutable_data(), g.data.data(), g.size() * sizeof(T));
    return out;
}

ScalarGrid to_scalar(const CArray<double>& a, double cellsize, std::optional<double> nodata)
{
    ScalarGrid g;
    static_cast<Grid<double>&>(g) = to_grid(a, "grid");
    g.cellsize = cellsize;
    g.nodata = nodata;
    return g;
}

RasterRGB to_rgb(const CArray<std::uint8_t>& a)
{
    const auto info = a.request();
    if (info.ndim != 3 || info.shape[2] != 3) {
        throw Error(ErrorKind::dimension_mismatch, "image must have shape (height, width, 3)");
    }
    RasterRGB img(static_cast<int>(info.shape[1]), static_cast<int>(info.shape[0]));
    std::memcpy(img.data.data(), info.ptr, img.size() * 3);
    return img;
}

py::dict scores_dict(const hoover::HooverScores& s)
{
    const auto& k = s.counts;
    py::dict counts;
    counts["n_gt"] = k.n_gt;
    counts["n_ms"] = k.n_ms;
    counts["correct"] = k.correct;
    counts["over_instances"] = k.over_instances;
    counts["over_gt"] = k.over_gt;
    counts["over_ms"] = k.over_ms;
    counts["under_instances"] = k.under_instances;
    counts["under_gt"] = k.under_gt;
    counts["under_ms"] = k.under_ms;
    counts["missed"] = k.missed;
    counts["noise"] = k.noise;
    py::dict d;
    d["threshold"] = s.threshold;
    d["correct_detection"] = s.correct_detection.value();
    d["over_segmentation"] = s.over_segmentation.value();
    d["under_segmentation"] = s.under_segmentation.value();
    d["missed"] = s.missed.value();
    d["noise"] = s.noise.value();
    d["correct_plus_over"] = s.correct_plus_over();
    d["counts"] = counts;
    return d;
}

harness::ParamList param_list(const py::dict& d)
{
    harness::ParamList out;
    for (const auto& [k, v] : d) out.emplace_back(py::cast<std::string>(k), py::cast<double>(v));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Native core of the spoilseg toolkit";

    static py::exception<Error> error_type(m, "SpoilsegError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type.ptr())(std::string(to_string(e.kind())) + ": " + e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    m.def(
        "hillshade",
        [](const CArray<double>& dsm, double cellsize, double azimuth, double altitude, double z_factor,
           std::optional<double> nodata) {
            return from_grid<double>(
                terrain::hillshade(to_scalar(dsm, cellsize, nodata), {azimuth, altitude, z_factor}));
        },
        py::arg("dsm"), py::arg("cellsize") = 1.0, py::arg("azimuth") = 315.0, py::arg("altitude") = 45.0,
        py::arg("z_factor") = 1.0, py::arg("nodata") = py::none());

    m.def(
        "sigmoidal_stretch",
        [](const CArray<double>& grid, double strength, double scale, std::optional<double> nodata) {
            return from_grid<double>(terrain::sigmoidal_stretch(to_scalar(grid, 1.0, nodata), {strength, scale}));
        },
        py::arg("grid"), py::arg("strength") = 3.0, py::arg("scale") = 2.0, py::arg("nodata") = py::none());

    m.def(
        "quantize8",
        [](const CArray<double>& grid, std::optional<double> nodata) {
            return from_grid<std::uint8_t>(terrain::quantize8(to_scalar(grid, 1.0, nodata)));
        },
        py::arg("grid"), py::arg("nodata") = py::none());

    m.def(
        "rgb_to_lab",
        [](const CArray<std::uint8_t>& image) {
            const auto lab = colorseg::rgb_to_lab(to_rgb(image));
            py::array_t<double> out({lab.height, lab.width, 3});
            std::memcpy(out.mutable_data(), lab.data.data(), lab.size() * sizeof(colorseg::Lab));
            return out;
        },
        py::arg("image"));

    m.def(
        "mean_shift_segment",
        [](const CArray<std::uint8_t>& image, double spatial_radius, double range_radius, int min_region_size,
           double convergence_eps, int max_iterations) {
            const auto img = to_rgb(image);
            colorseg::MeanShiftParams p{spatial_radius, range_radius, min_region_size, convergence_eps,
                                        max_iterations};
            LabelMap out;
            {
                py::gil_scoped_release release;
                out = colorseg::mean_shift_segment(img, p);
            }
            return from_grid(out);
        },
        py::arg("image"), py::arg("spatial_radius") = 5.0, py::arg("range_radius") = 20.0,
        py::arg("min_region_size") = 10000, py::arg("convergence_eps") = 0.01, py::arg("max_iterations") = 50);

    m.def(
        "slic",
        [](const CArray<std::uint8_t>& image, int superpixels, double compactness, int iterations, int min_size) {
            const auto lab = colorseg::rgb_to_lab(to_rgb(image));
            LabelMap out;
            {
                py::gil_scoped_release release;
                out = colorseg::slic(lab, {superpixels, compactness, iterations, min_size});
            }
            return from_grid(out);
        },
        py::arg("image"), py::arg("superpixels") = 550, py::arg("compactness") = 30.0, py::arg("iterations") = 10,
        py::arg("min_size") = 0);

    m.def(
        "voronoi_segment",
        [](const CArray<std::uint8_t>& hillshade, double sigma, std::optional<int> peak_radius,
           bool restrict_to_foreground, bool invert) {
            const auto img = to_grid(hillshade, "hillshade");
            morph::VoronoiParams p{sigma, peak_radius, restrict_to_foreground, invert};
            LabelMap out;
            {
                py::gil_scoped_release release;
                out = morph::voronoi_pipeline(img, p);
            }
            return from_grid(out);
        },
        py::arg("hillshade"), py::arg("sigma") = 12.0, py::arg("peak_radius") = py::none(),
        py::arg("restrict_to_foreground") = true, py::arg("invert") = false);

    m.def(
        "otsu_threshold",
        [](const CArray<std::uint8_t>& image) {
            const auto r = morph::otsu_threshold(to_grid(image, "image"));
            return py::make_tuple(r.threshold, from_grid<std::uint8_t>(r.mask).attr("astype")("bool"));
        },
        py::arg("image"));

    m.def(
        "relabel_connected",
        [](const CArray<std::uint32_t>& labels, int connectivity) {
            if (connectivity != 4 && connectivity != 8) throw Error(ErrorKind::invalid_argument, "connectivity must be 4 or 8");
            return from_grid(relabel_connected(to_grid(labels, "labels"), static_cast<Connectivity>(connectivity)));
        },
        py::arg("labels"), py::arg("connectivity") = 4);

    m.def(
        "evaluate",
        [](const CArray<std::uint32_t>& gt, const CArray<std::uint32_t>& ms, double threshold) {
            const auto e = hoover::evaluate(to_grid(gt, "gt"), to_grid(ms, "ms"), threshold);
            py::dict d = scores_dict(e.scores);
            py::list correct, over, under;
            for (const auto& [g, s] : e.classification.correct) correct.append(py::make_tuple(g, s));
            for (const auto& o : e.classification.over) over.append(py::make_tuple(o.gt, o.ms));
            for (const auto& u : e.classification.under) under.append(py::make_tuple(u.ms, u.gt));
            py::dict inst;
            inst["correct"] = correct;
            inst["over"] = over;
            inst["under"] = under;
            inst["missed"] = e.classification.missed;
            inst["noise"] = e.classification.noise;
            d["instances"] = inst;
            return d;
        },
        py::arg("gt"), py::arg("ms"), py::arg("threshold") = 0.5);

    m.def(
        "synth_pilefield",
        [](int rows, int cols, int n_bumps, double bump_sigma, std::uint64_t seed, double amplitude, double noise) {
            const auto f = harness::synth_pilefield(rows, cols, n_bumps, bump_sigma, seed, {amplitude, noise});
            return py::make_tuple(from_grid<double>(f.dsm), from_grid(f.gt), f.centers);
        },
        py::arg("rows"), py::arg("cols"), py::arg("n_bumps"), py::arg("bump_sigma"), py::arg("seed"),
        py::arg("amplitude") = 2.0, py::arg("noise") = 0.4);

    m.def(
        "relief8", [](const CArray<double>& dsm) { return from_grid<std::uint8_t>(harness::relief8(to_scalar(dsm, 1.0, {}))); },
        py::arg("dsm"));

    m.def(
        "normalize_mask",
        [](const CArray<std::uint32_t>& mask, std::int64_t min_region, int connectivity) {
            if (connectivity != 4 && connectivity != 8) throw Error(ErrorKind::invalid_argument, "connectivity must be 4 or 8");
            return from_grid(harness::normalize_mask(to_grid(mask, "mask"), min_region, static_cast<Connectivity>(connectivity)));
        },
        py::arg("mask"), py::arg("min_region") = 0, py::arg("connectivity") = 4);

    m.def(
        "run_sweep",
        [](const std::filesystem::path& config, unsigned threads) {
            const auto cfg = harness::load_sweep_config(config);
            harness::SweepReport report;
            {
                py::gil_scoped_release release;
                report = harness::run_sweep(cfg, threads);
            }
            return harness::render_json(report);
        },
        py::arg("config"), py::arg("threads") = 0,
        "Runs a sweep from a JSON config file and returns the JSON report text.");

    m.def(
        "run_sweep_arrays",
        [](const std::string& algorithm, const py::dict& grid, const CArray<std::uint32_t>& ground_truth,
           std::optional<CArray<std::uint8_t>> image, std::optional<CArray<std::uint8_t>> hillshade,
           const py::dict& fixed, double threshold, unsigned threads) {
            harness::SweepConfig cfg;
            cfg.algorithm = harness::parse_algorithm(algorithm);
            cfg.threshold = threshold;
            for (const auto& [k, v] : grid) {
                cfg.grid.emplace_back(py::cast<std::string>(k), py::cast<std::vector<double>>(v));
            }
            cfg.fixed = param_list(fixed);
            cfg.validate();
            harness::SweepData data;
            data.ground_truth = to_grid(ground_truth, "ground_truth");
            if (image) data.image = to_rgb(*image);
            if (hillshade) data.hillshade = to_grid(*hillshade, "hillshade");
            harness::SweepReport report;
            {
                py::gil_scoped_release release;
                report = harness::run_sweep(cfg, data, threads);
            }
            return harness::render_json(report);
        },
        py::arg("algorithm"), py::arg("grid"), py::arg("ground_truth"), py::arg("image") = py::none(),
        py::arg("hillshade") = py::none(), py::arg("fixed") = py::dict(), py::arg("threshold") = 0.5,
        py::arg("threads") = 0);

    m.def("read_pgm16", [](const std::filesystem::path& p) { return from_grid(io::read_pgm16(p)); }, py::arg("path"));
    m.def(
        "write_pgm16", [](const CArray<std::uint32_t>& labels, const std::filesystem::path& p) {
            io::write_pgm16(to_grid(labels, "labels"), p);
        },
        py::arg("labels"), py::arg("path"));
}
