#include "spoilseg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "../parallel.hpp"

namespace spoilseg::harness {

namespace {

enum class ParamKind { real, integer, boolean };

struct ParamSpec {
    std::string_view name;
    ParamKind kind;
};

const std::vector<ParamSpec>& specs(Algorithm algorithm)
{
    static const std::vector<ParamSpec> meanshift = {
        {"spatial_radius", ParamKind::real},   {"range_radius", ParamKind::real},
        {"min_region_size", ParamKind::integer}, {"convergence_eps", ParamKind::real},
        {"max_iterations", ParamKind::integer},
    };
    static const std::vector<ParamSpec> slic = {
        {"superpixels", ParamKind::integer},
        {"compactness", ParamKind::real},
        {"iterations", ParamKind::integer},
        {"min_size", ParamKind::integer},
    };
    static const std::vector<ParamSpec> voronoi = {
        {"sigma", ParamKind::real},
        {"peak_radius", ParamKind::integer},
        {"restrict_to_foreground", ParamKind::boolean},
        {"invert", ParamKind::boolean},
    };
    switch (algorithm) {
    case Algorithm::meanshift: return meanshift;
    case Algorithm::slic: return slic;
    case Algorithm::voronoi: return voronoi;
    }
    throw Error(ErrorKind::invalid_argument, "unknown algorithm");
}

const ParamSpec& find_spec(Algorithm algorithm, std::string_view name)
{
    for (const auto& s : specs(algorithm)) {
        if (s.name == name) return s;
    }
    throw Error(ErrorKind::invalid_argument,
                "unknown parameter '" + std::string(name) + "' for " + std::string(to_string(algorithm)));
}

int as_int(std::string_view name, double v)
{
    if (!std::isfinite(v) || v != std::floor(v) || std::fabs(v) > std::numeric_limits<int>::max()) {
        throw Error(ErrorKind::invalid_argument, "parameter '" + std::string(name) + "' must be an integer");
    }
    return static_cast<int>(v);
}

bool as_bool(std::string_view name, double v)
{
    if (v != 0.0 && v != 1.0) {
        throw Error(ErrorKind::invalid_argument, "parameter '" + std::string(name) + "' must be 0 or 1");
    }
    return v == 1.0;
}

void check_finite(std::string_view name, double v)
{
    if (!std::isfinite(v)) {
        throw Error(ErrorKind::invalid_argument, "parameter '" + std::string(name) + "' must be finite");
    }
}

// Checks a single value against its parameter's bounds, all other parameters
// at their defaults.
void check_value(Algorithm algorithm, const std::string& name, double value)
{
    const ParamList one{{name, value}};
    switch (algorithm) {
    case Algorithm::meanshift: meanshift_params(one).validate(); break;
    case Algorithm::slic: slic_params(one).validate(std::numeric_limits<std::size_t>::max()); break;
    case Algorithm::voronoi: voronoi_params(one).validate(); break;
    }
}

ParamList merged(const SweepConfig& config, const ParamList& params)
{
    ParamList all = config.fixed;
    all.insert(all.end(), params.begin(), params.end());
    return all;
}

using ojson = nlohmann::ordered_json;

double json_param_value(const std::string& name, const ojson& v)
{
    if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
    if (v.is_number()) return v.get<double>();
    throw Error(ErrorKind::invalid_argument, "parameter '" + name + "' must be a number or boolean");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    if (p.empty()) return {};
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

} // namespace

std::string_view to_string(Algorithm algorithm)
{
    switch (algorithm) {
    case Algorithm::meanshift: return "meanshift";
    case Algorithm::slic: return "slic";
    case Algorithm::voronoi: return "voronoi";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name)
{
    if (name == "meanshift") return Algorithm::meanshift;
    if (name == "slic") return Algorithm::slic;
    if (name == "voronoi") return Algorithm::voronoi;
    throw Error(ErrorKind::invalid_argument, "unknown algorithm '" + std::string(name) + "'");
}

std::vector<std::string> parameter_names(Algorithm algorithm)
{
    std::vector<std::string> names;
    for (const auto& s : specs(algorithm)) names.emplace_back(s.name);
    return names;
}

colorseg::MeanShiftParams meanshift_params(const ParamList& values)
{
    colorseg::MeanShiftParams p;
    for (const auto& [name, v] : values) {
        find_spec(Algorithm::meanshift, name);
        check_finite(name, v);
        if (name == "spatial_radius") p.spatial_radius = v;
        else if (name == "range_radius") p.range_radius = v;
        else if (name == "min_region_size") p.min_region_size = as_int(name, v);
        else if (name == "convergence_eps") p.convergence_eps = v;
        else if (name == "max_iterations") p.max_iterations = as_int(name, v);
    }
    return p;
}

colorseg::SlicParams slic_params(const ParamList& values)
{
    colorseg::SlicParams p;
    for (const auto& [name, v] : values) {
        find_spec(Algorithm::slic, name);
        check_finite(name, v);
        if (name == "superpixels") p.superpixels = as_int(name, v);
        else if (name == "compactness") p.compactness = v;
        else if (name == "iterations") p.iterations = as_int(name, v);
        else if (name == "min_size") p.min_size = as_int(name, v);
    }
    return p;
}

morph::VoronoiParams voronoi_params(const ParamList& values)
{
    morph::VoronoiParams p;
    for (const auto& [name, v] : values) {
        find_spec(Algorithm::voronoi, name);
        check_finite(name, v);
        if (name == "sigma") p.sigma = v;
        else if (name == "peak_radius") p.peak_radius = as_int(name, v);
        else if (name == "restrict_to_foreground") p.restrict_to_foreground = as_bool(name, v);
        else if (name == "invert") p.invert = as_bool(name, v);
    }
    return p;
}

void SweepConfig::validate() const
{
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "threshold must lie in (0, 1]");
    }
    if (grid.empty()) throw Error(ErrorKind::invalid_argument, "sweep grid is empty");
    std::set<std::string> seen;
    auto claim = [&](const std::string& name) {
        find_spec(algorithm, name);
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::invalid_argument, "parameter '" + name + "' declared more than once");
        }
    };
    for (const auto& [name, values] : grid) {
        claim(name);
        if (values.empty()) throw Error(ErrorKind::invalid_argument, "parameter '" + name + "' has no values");
        for (double v : values) check_value(algorithm, name, v);
    }
    for (const auto& [name, v] : fixed) {
        claim(name);
        check_value(algorithm, name, v);
    }
}

std::size_t SweepConfig::combination_count() const
{
    std::size_t n = 1;
    for (const auto& [name, values] : grid) n *= values.size();
    return grid.empty() ? 0 : n;
}

ParamList SweepConfig::combination(std::size_t index) const
{
    ParamList out(grid.size());
    for (std::size_t k = grid.size(); k-- > 0;) {
        const auto& [name, values] = grid[k];
        out[k] = {name, values[index % values.size()]};
        index /= values.size();
    }
    return out;
}

SweepConfig parse_sweep_config(std::string_view json_text, const std::filesystem::path& base_dir)
{
    ojson doc;
    try {
        doc = ojson::parse(json_text);
    } catch (const ojson::parse_error& e) {
        throw Error(ErrorKind::malformed_header, std::string("sweep config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::malformed_header, "sweep config must be a JSON object");

    auto require = [&](const char* key) -> const ojson& {
        if (!doc.contains(key)) throw Error(ErrorKind::missing_key, std::string("sweep config lacks '") + key + "'");
        return doc.at(key);
    };

    SweepConfig cfg;
    try {
        cfg.algorithm = parse_algorithm(require("algorithm").get<std::string>());
        const auto& inputs = require("inputs");
        cfg.inputs.image = resolve(base_dir, inputs.value("image", std::string{}));
        cfg.inputs.hillshade = resolve(base_dir, inputs.value("hillshade", std::string{}));
        cfg.inputs.ground_truth = resolve(base_dir, inputs.value("ground_truth", std::string{}));
        cfg.threshold = doc.value("threshold", 0.5);
        const int conn = doc.value("connectivity", 4);
        if (conn != 4 && conn != 8) throw Error(ErrorKind::invalid_argument, "connectivity must be 4 or 8");
        cfg.connectivity = conn == 4 ? Connectivity::four : Connectivity::eight;

        for (const auto& [name, values] : require("grid").items()) {
            std::vector<double> list;
            if (values.is_array()) {
                for (const auto& v : values) list.push_back(json_param_value(name, v));
            } else {
                list.push_back(json_param_value(name, values));
            }
            cfg.grid.emplace_back(name, std::move(list));
        }
        if (doc.contains("fixed")) {
            for (const auto& [name, v] : doc.at("fixed").items()) cfg.fixed.emplace_back(name, json_param_value(name, v));
        }
    } catch (const ojson::exception& e) {
        throw Error(ErrorKind::malformed_header, std::string("sweep config has a field of the wrong type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path)
{
    return parse_sweep_config(io::read_file(path), path.parent_path());
}

SweepData load_sweep_data(const SweepConfig& config)
{
    SweepData data;
    if (config.inputs.ground_truth.empty()) {
        throw Error(ErrorKind::missing_key, "sweep config names no ground truth");
    }
    data.ground_truth = io::read_pgm16(config.inputs.ground_truth);
    if (config.algorithm == Algorithm::voronoi) {
        if (config.inputs.hillshade.empty()) throw Error(ErrorKind::missing_key, "voronoi sweep needs a hillshade input");
        data.hillshade = io::read_pgm8(config.inputs.hillshade);
    } else {
        if (config.inputs.image.empty()) throw Error(ErrorKind::missing_key, "colour sweep needs an image input");
        data.image = io::read_ppm(config.inputs.image);
    }
    return data;
}

std::optional<std::size_t> select_optimum(const std::vector<SweepRow>& rows)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].scores) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& a = rows[i].scores->correct_detection;
        const auto& b = rows[*best].scores->correct_detection;
        // Strictly greater only, so the earlier row wins a tie.
        if (static_cast<__int128>(a.num) * b.den > static_cast<__int128>(b.num) * a.den) best = i;
    }
    return best;
}

hoover::HooverScores run_row(const SweepConfig& config, const SweepData& data, const ParamList& params)
{
    const ParamList all = merged(config, params);
    LabelMap labels;
    switch (config.algorithm) {
    case Algorithm::meanshift:
        labels = colorseg::mean_shift_segment(data.image, meanshift_params(all));
        break;
    case Algorithm::slic:
        labels = colorseg::slic(colorseg::rgb_to_lab(data.image), slic_params(all));
        break;
    case Algorithm::voronoi:
        labels = morph::voronoi_pipeline(data.hillshade, voronoi_params(all));
        break;
    }
    labels = relabel_connected(labels, config.connectivity);
    return hoover::evaluate(data.ground_truth, labels, config.threshold).scores;
}

SweepReport run_sweep(const SweepConfig& config, const SweepData& data, unsigned max_threads)
{
    config.validate();
    if (positive_labels(data.ground_truth).empty()) {
        throw Error(ErrorKind::degenerate_input, "ground truth has no regions");
    }

    SweepReport report;
    report.algorithm = config.algorithm;
    report.threshold = config.threshold;
    for (const auto& [name, values] : config.grid) report.param_names.push_back(name);
    report.rows.resize(config.combination_count());

    detail::parallel_for(
        report.rows.size(),
        [&](std::size_t i) {
            auto& row = report.rows[i];
            row.params = config.combination(i);
            try {
                row.scores = run_row(config, data, row.params);
            } catch (const std::exception& e) {
                row.error = e.what();
                if (row.error.empty()) row.error = "row failed";
            }
        },
        max_threads);

    report.optimum = select_optimum(report.rows);
    return report;
}

SweepReport run_sweep(const SweepConfig& config, unsigned max_threads)
{
    config.validate();
    return run_sweep(config, load_sweep_data(config), max_threads);
}

} // namespace spoilseg::harness
