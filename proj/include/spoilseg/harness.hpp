#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spoilseg/colorseg.hpp"
#include "spoilseg/hoover.hpp"
#include "spoilseg/morphseg.hpp"
#include "spoilseg/raster.hpp"

namespace spoilseg::harness {

enum class Algorithm { meanshift, slic, voronoi };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

/// Parameter names accepted for an algorithm, in canonical order.
std::vector<std::string> parameter_names(Algorithm algorithm);

using ParamList = std::vector<std::pair<std::string, double>>;

colorseg::MeanShiftParams meanshift_params(const ParamList& values);
colorseg::SlicParams slic_params(const ParamList& values);
morph::VoronoiParams voronoi_params(const ParamList& values);

struct SweepInputs {
    std::filesystem::path image;         // PPM, for meanshift and slic
    std::filesystem::path hillshade;     // 8-bit PGM, for voronoi
    std::filesystem::path ground_truth;  // 16-bit PGM label map
};

struct SweepConfig {
    Algorithm algorithm = Algorithm::voronoi;
    SweepInputs inputs;
    double threshold = 0.5;
    Connectivity connectivity = Connectivity::four;
    /// Swept parameters in declaration order; the first one varies slowest.
    std::vector<std::pair<std::string, std::vector<double>>> grid;
    /// Parameters held constant across the sweep.
    ParamList fixed;

    /// Throws invalid_argument for an empty grid, unknown or duplicated
    /// parameter names, or values outside a parameter's bounds.
    void validate() const;
    std::size_t combination_count() const;
    /// The i-th combination of the Cartesian product, grid parameters only.
    ParamList combination(std::size_t index) const;
};

/// Parses the JSON sweep schema; relative input paths resolve against base_dir.
SweepConfig parse_sweep_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& path);

struct SweepData {
    RasterRGB image;
    GrayImage hillshade;
    LabelMap ground_truth;
};

SweepData load_sweep_data(const SweepConfig& config);

struct SweepRow {
    ParamList params;
    std::optional<hoover::HooverScores> scores;
    std::string error;  // non-empty exactly when scores is empty

    bool operator==(const SweepRow&) const = default;
};

struct SweepReport {
    Algorithm algorithm = Algorithm::voronoi;
    double threshold = 0.5;
    std::vector<std::string> param_names;
    std::vector<SweepRow> rows;
    /// Row with the highest correct detection (ties: earliest row); empty
    /// when every row failed.
    std::optional<std::size_t> optimum;

    bool operator==(const SweepReport&) const = default;
};

/// Index of the best row, comparing exact correct-detection fractions.
std::optional<std::size_t> select_optimum(const std::vector<SweepRow>& rows);

/// Segments with one parameter combination (fixed values merged in), relabels
/// connected components and evaluates against the ground truth.
hoover::HooverScores run_row(const SweepConfig& config, const SweepData& data, const ParamList& params);

SweepReport run_sweep(const SweepConfig& config, const SweepData& data, unsigned max_threads = 0);
SweepReport run_sweep(const SweepConfig& config, unsigned max_threads = 0);

struct ExternalMaskMetadata {
    std::string source;
    std::vector<std::pair<std::string, std::string>> parameters;

    bool operator==(const ExternalMaskMetadata&) const = default;
};

/// Relabels connected components and drops those smaller than min_region
/// pixels to background; labels come out as 1..K in scan order.
LabelMap normalize_mask(const LabelMap& mask, std::int64_t min_region = 0,
                        Connectivity connectivity = Connectivity::four);

struct IngestedMask {
    LabelMap labels;
    ExternalMaskMetadata metadata;
    std::int64_t dropped_regions = 0;
};

IngestedMask ingest_external_mask(const std::filesystem::path& path, const ExternalMaskMetadata& meta,
                                  std::int64_t min_region = 0, Connectivity connectivity = Connectivity::four);

struct SynthOptions {
    double amplitude = 2.0;
    double noise = 0.4;  // half-width of the uniform noise floor
};

struct SynthField {
    ScalarGrid dsm;
    LabelMap gt;
    std::vector<std::pair<double, double>> centers;  // (x, y) per bump, gt label i + 1
};

/// Gaussian bumps on a jittered grid over a uniform noise floor. Throws
/// placement when the grid spacing cannot keep neighbouring 2-sigma disks
/// apart.
SynthField synth_pilefield(int rows, int cols, int n_bumps, double bump_sigma, std::uint64_t seed,
                           const SynthOptions& options = {});

/// 8-bit relief image used as segmentation input: default sigmoid stretch,
/// then quantisation.
GrayImage relief8(const ScalarGrid& dsm);

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view name);

std::string render_csv(const SweepReport& report);
std::string render_json(const SweepReport& report);
SweepReport report_from_json(std::string_view json_text);
void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path);

std::string render_evaluation_json(const hoover::Evaluation& evaluation,
                                   const std::optional<ExternalMaskMetadata>& source = std::nullopt);
std::string render_evaluation_csv(const hoover::HooverScores& scores);

} // namespace spoilseg::harness
