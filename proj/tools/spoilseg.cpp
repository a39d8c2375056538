#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spoilseg/colorseg.hpp"
#include "spoilseg/harness.hpp"
#include "spoilseg/hoover.hpp"
#include "spoilseg/morphseg.hpp"
#include "spoilseg/raster.hpp"
#include "spoilseg/terrain.hpp"

namespace fs = std::filesystem;
using namespace spoilseg;

namespace {

void print_error(std::string_view kind, const std::string& message)
{
    nlohmann::ordered_json j;
    j["error"] = std::string(kind);
    j["message"] = message;
    std::cerr << j.dump() << '\n';
}

Connectivity to_connectivity(int c)
{
    if (c != 4 && c != 8) throw Error(ErrorKind::invalid_argument, "connectivity must be 4 or 8");
    return c == 4 ? Connectivity::four : Connectivity::eight;
}

harness::ExternalMaskMetadata parse_metadata(const std::string& source, const std::vector<std::string>& params)
{
    harness::ExternalMaskMetadata meta;
    meta.source = source;
    for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error(ErrorKind::invalid_argument, "metadata parameter '" + kv + "' is not key=value");
        }
        meta.parameters.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return meta;
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        io::write_file(path, text);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Raster segmentation toolkit for spoil-pile fields"};
    app.require_subcommand(1);

    // hillshade
    auto* hs_cmd = app.add_subcommand("hillshade", "Horn hillshade plus sigmoid stretch of a DSM");
    std::string hs_dsm, hs_out, hs_shading = "horn";
    terrain::HillshadeParams hs_params;
    terrain::StretchParams st_params;
    hs_cmd->add_option("--dsm", hs_dsm, "Input ESRI ASCII grid")->required()->check(CLI::ExistingFile);
    hs_cmd->add_option("--azimuth", hs_params.azimuth_deg, "Sun azimuth, degrees clockwise from north")
        ->capture_default_str();
    hs_cmd->add_option("--altitude", hs_params.altitude_deg, "Sun altitude, degrees")->capture_default_str();
    hs_cmd->add_option("--z-factor", hs_params.z_factor, "Vertical exaggeration")->capture_default_str();
    hs_cmd->add_option("--strength", st_params.strength, "Sigmoid strength")->capture_default_str();
    hs_cmd->add_option("--scale", st_params.scale, "Sigmoid scale")->capture_default_str();
    hs_cmd->add_option("--shading", hs_shading, "horn, or none to stretch the DSM directly")
        ->check(CLI::IsMember({"horn", "none"}))
        ->capture_default_str();
    hs_cmd->add_option("--out", hs_out, "Output path; .asc writes floats, .pgm writes 8-bit")->required();

    // segment
    auto* seg_cmd = app.add_subcommand("segment", "Run one segmentation algorithm");
    seg_cmd->require_subcommand(1);
    int seg_conn = 4;
    seg_cmd->add_option("--connectivity", seg_conn, "Connectivity for the final relabelling")->capture_default_str();

    auto* ms_cmd = seg_cmd->add_subcommand("meanshift", "Mean shift on an RGB image");
    std::string ms_in, ms_out;
    colorseg::MeanShiftParams ms_params;
    ms_cmd->add_option("--in", ms_in, "Input PPM")->required()->check(CLI::ExistingFile);
    ms_cmd->add_option("--hs", ms_params.spatial_radius, "Spatial radius, pixels")->capture_default_str();
    ms_cmd->add_option("--hr", ms_params.range_radius, "Range radius, DN")->capture_default_str();
    ms_cmd->add_option("--min-region", ms_params.min_region_size, "Minimum region size, pixels")->capture_default_str();
    ms_cmd->add_option("--eps", ms_params.convergence_eps, "Convergence threshold")->capture_default_str();
    ms_cmd->add_option("--max-iter", ms_params.max_iterations, "Iteration cap")->capture_default_str();
    ms_cmd->add_option("--out", ms_out, "Output 16-bit PGM label map")->required();

    auto* slic_cmd = seg_cmd->add_subcommand("slic", "SLIC superpixels on an RGB image");
    std::string slic_in, slic_out;
    colorseg::SlicParams slic_params;
    slic_cmd->add_option("--in", slic_in, "Input PPM")->required()->check(CLI::ExistingFile);
    slic_cmd->add_option("--k", slic_params.superpixels, "Superpixel count")->capture_default_str();
    slic_cmd->add_option("--m", slic_params.compactness, "Compactness")->capture_default_str();
    slic_cmd->add_option("--iterations", slic_params.iterations, "Iterations")->capture_default_str();
    slic_cmd->add_option("--min-size", slic_params.min_size, "Connectivity minimum size, 0 for (N/k)/4")
        ->capture_default_str();
    slic_cmd->add_option("--out", slic_out, "Output 16-bit PGM label map")->required();

    auto* vor_cmd = seg_cmd->add_subcommand("voronoi", "Blur, seed and tessellate an 8-bit hillshade");
    std::string vor_in, vor_out;
    morph::VoronoiParams vor_params;
    int vor_peak = 0;
    bool vor_no_restrict = false;
    vor_cmd->add_option("--in", vor_in, "Input 8-bit PGM hillshade")->required()->check(CLI::ExistingFile);
    vor_cmd->add_option("--sigma", vor_params.sigma, "Gaussian sigma, pixels")->capture_default_str();
    vor_cmd->add_option("--peak-radius", vor_peak, "Local-maximum radius (default ceil(sigma))");
    vor_cmd->add_flag("--invert", vor_params.invert, "Foreground is at or below the Otsu threshold");
    vor_cmd->add_flag("--no-restrict", vor_no_restrict, "Label background pixels too");
    vor_cmd->add_option("--out", vor_out, "Output 16-bit PGM label map")->required();

    // evaluate
    auto* ev_cmd = app.add_subcommand("evaluate", "Hoover metrics of a label map against ground truth");
    std::string ev_gt, ev_pred, ev_out, ev_format = "json", ev_source;
    std::vector<std::string> ev_meta;
    double ev_threshold = 0.5;
    ev_cmd->add_option("--gt", ev_gt, "Ground-truth 16-bit PGM")->required()->check(CLI::ExistingFile);
    ev_cmd->add_option("--pred", ev_pred, "Machine segmentation 16-bit PGM")->required()->check(CLI::ExistingFile);
    ev_cmd->add_option("--threshold", ev_threshold, "Overlap threshold T")->capture_default_str();
    ev_cmd->add_option("--format", ev_format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    ev_cmd->add_option("--source", ev_source, "Name of the model that produced --pred");
    ev_cmd->add_option("--meta", ev_meta, "Model parameter as key=value (repeatable)");
    ev_cmd->add_option("--out", ev_out, "Report path (stdout when omitted)");

    // sweep
    auto* sw_cmd = app.add_subcommand("sweep", "Parameter sweep from a JSON config");
    std::string sw_config, sw_csv, sw_json;
    unsigned sw_threads = 0;
    sw_cmd->add_option("--config", sw_config, "Sweep config JSON")->required()->check(CLI::ExistingFile);
    sw_cmd->add_option("--csv", sw_csv, "CSV report path");
    sw_cmd->add_option("--json", sw_json, "JSON report path (stdout when neither path is given)");
    sw_cmd->add_option("--threads", sw_threads, "Worker threads, 0 for all cores")->capture_default_str();

    // ingest
    auto* in_cmd = app.add_subcommand("ingest", "Normalise an externally produced label mask");
    std::string in_path, in_out, in_source;
    std::vector<std::string> in_meta;
    std::int64_t in_min_region = 0;
    int in_conn = 4;
    in_cmd->add_option("--in", in_path, "16-bit PGM label mask")->required()->check(CLI::ExistingFile);
    in_cmd->add_option("--out", in_out, "Normalised 16-bit PGM")->required();
    in_cmd->add_option("--min-region", in_min_region, "Drop regions smaller than this")->capture_default_str();
    in_cmd->add_option("--connectivity", in_conn, "4 or 8")->capture_default_str();
    in_cmd->add_option("--source", in_source, "Producing model");
    in_cmd->add_option("--meta", in_meta, "Model parameter as key=value (repeatable)");

    // synth
    auto* sy_cmd = app.add_subcommand("synth", "Synthetic pile field with ground truth");
    int sy_rows = 300, sy_cols = 300, sy_bumps = 9;
    double sy_sigma = 8.0;
    std::uint64_t sy_seed = 42;
    harness::SynthOptions sy_opts;
    std::string sy_dsm, sy_gt, sy_relief;
    sy_cmd->add_option("--rows", sy_rows)->capture_default_str();
    sy_cmd->add_option("--cols", sy_cols)->capture_default_str();
    sy_cmd->add_option("--bumps", sy_bumps)->capture_default_str();
    sy_cmd->add_option("--bump-sigma", sy_sigma)->capture_default_str();
    sy_cmd->add_option("--seed", sy_seed)->capture_default_str();
    sy_cmd->add_option("--amplitude", sy_opts.amplitude)->capture_default_str();
    sy_cmd->add_option("--noise", sy_opts.noise, "Half-width of the uniform noise floor")->capture_default_str();
    sy_cmd->add_option("--dsm", sy_dsm, "Output ESRI ASCII grid");
    sy_cmd->add_option("--gt", sy_gt, "Output 16-bit PGM ground truth")->required();
    sy_cmd->add_option("--relief", sy_relief, "Output 8-bit PGM relief image");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (*hs_cmd) {
            const ScalarGrid dsm = io::read_asc_grid(hs_dsm);
            const ScalarGrid shaded = hs_shading == "horn" ? terrain::hillshade(dsm, hs_params) : dsm;
            ScalarGrid stretched = terrain::sigmoidal_stretch(shaded, st_params);
            if (fs::path(hs_out).extension() == ".pgm") {
                io::write_pgm8(terrain::quantize8(stretched), hs_out);
            } else {
                if (!stretched.nodata) stretched.nodata = -9999.0;
                io::write_asc_grid(stretched, hs_out);
            }
        } else if (*seg_cmd) {
            const Connectivity conn = to_connectivity(seg_conn);
            LabelMap labels;
            std::string out;
            if (*ms_cmd) {
                labels = colorseg::mean_shift_segment(io::read_ppm(ms_in), ms_params);
                out = ms_out;
            } else if (*slic_cmd) {
                labels = colorseg::slic(colorseg::rgb_to_lab(io::read_ppm(slic_in)), slic_params);
                out = slic_out;
            } else {
                if (vor_peak > 0) vor_params.peak_radius = vor_peak;
                vor_params.restrict_to_foreground = !vor_no_restrict;
                labels = morph::voronoi_pipeline(io::read_pgm8(vor_in), vor_params);
                out = vor_out;
            }
            io::write_pgm16(relabel_connected(labels, conn), out);
        } else if (*ev_cmd) {
            const auto ev = hoover::evaluate(io::read_pgm16(ev_gt), io::read_pgm16(ev_pred), ev_threshold);
            std::optional<harness::ExternalMaskMetadata> meta;
            if (!ev_source.empty() || !ev_meta.empty()) meta = parse_metadata(ev_source, ev_meta);
            write_output(ev_out, ev_format == "json" ? harness::render_evaluation_json(ev, meta)
                                                     : harness::render_evaluation_csv(ev.scores));
        } else if (*sw_cmd) {
            const auto cfg = harness::load_sweep_config(sw_config);
            const auto report = harness::run_sweep(cfg, sw_threads);
            if (!sw_csv.empty()) harness::emit_report(report, harness::ReportFormat::csv, sw_csv);
            if (!sw_json.empty()) harness::emit_report(report, harness::ReportFormat::json, sw_json);
            if (sw_csv.empty() && sw_json.empty()) std::cout << harness::render_json(report);
        } else if (*in_cmd) {
            const auto meta = parse_metadata(in_source, in_meta);
            const auto mask = harness::ingest_external_mask(in_path, meta, in_min_region, to_connectivity(in_conn));
            io::write_pgm16(mask.labels, in_out);
            nlohmann::ordered_json j;
            j["regions"] = positive_labels(mask.labels).size();
            j["dropped_regions"] = mask.dropped_regions;
            j["source"] = meta.source;
            std::cout << j.dump() << '\n';
        } else if (*sy_cmd) {
            const auto field = harness::synth_pilefield(sy_rows, sy_cols, sy_bumps, sy_sigma, sy_seed, sy_opts);
            io::write_pgm16(field.gt, sy_gt);
            if (!sy_dsm.empty()) io::write_asc_grid(field.dsm, sy_dsm);
            if (!sy_relief.empty()) io::write_pgm8(harness::relief8(field.dsm), sy_relief);
        }
    } catch (const Error& e) {
        print_error(to_string(e.kind()), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
