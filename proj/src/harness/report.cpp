#include "spoilseg/harness.hpp"

#include <json.hpp>

#include "../numfmt.hpp"

namespace spoilseg::harness {

namespace {

using ojson = nlohmann::ordered_json;

ojson counts_json(const hoover::HooverCounts& k)
{
    ojson j;
    j["n_gt"] = k.n_gt;
    j["n_ms"] = k.n_ms;
    j["correct"] = k.correct;
    j["over_instances"] = k.over_instances;
    j["over_gt"] = k.over_gt;
    j["over_ms"] = k.over_ms;
    j["under_instances"] = k.under_instances;
    j["under_gt"] = k.under_gt;
    j["under_ms"] = k.under_ms;
    j["missed"] = k.missed;
    j["noise"] = k.noise;
    return j;
}

hoover::HooverCounts counts_from_json(const ojson& j)
{
    hoover::HooverCounts k;
    k.n_gt = j.at("n_gt").get<std::int64_t>();
    k.n_ms = j.at("n_ms").get<std::int64_t>();
    k.correct = j.at("correct").get<std::int64_t>();
    k.over_instances = j.at("over_instances").get<std::int64_t>();
    k.over_gt = j.at("over_gt").get<std::int64_t>();
    k.over_ms = j.at("over_ms").get<std::int64_t>();
    k.under_instances = j.at("under_instances").get<std::int64_t>();
    k.under_gt = j.at("under_gt").get<std::int64_t>();
    k.under_ms = j.at("under_ms").get<std::int64_t>();
    k.missed = j.at("missed").get<std::int64_t>();
    k.noise = j.at("noise").get<std::int64_t>();
    return k;
}

ojson scores_json(const hoover::HooverScores& s)
{
    ojson j;
    j["threshold"] = s.threshold;
    j["correct_detection"] = s.correct_detection.value();
    j["over_segmentation"] = s.over_segmentation.value();
    j["under_segmentation"] = s.under_segmentation.value();
    j["missed"] = s.missed.value();
    j["noise"] = s.noise.value();
    j["correct_plus_over"] = s.correct_plus_over();
    j["counts"] = counts_json(s.counts);
    return j;
}

// Scores are rebuilt from the integer counts, so parsing is exact.
hoover::HooverScores scores_from_json(const ojson& j)
{
    hoover::HooverScores s;
    s.threshold = j.at("threshold").get<double>();
    s.counts = counts_from_json(j.at("counts"));
    const auto n = s.counts.n_gt;
    s.correct_detection = {s.counts.correct, n};
    s.over_segmentation = {s.counts.over_gt, n};
    s.under_segmentation = {s.counts.under_gt, n};
    s.missed = {s.counts.missed, n};
    s.noise = s.counts.n_ms > 0 ? hoover::Fraction{s.counts.noise, s.counts.n_ms} : hoover::Fraction{0, 1};
    return s;
}

ojson params_json(const ParamList& params)
{
    ojson j = ojson::object();
    for (const auto& [name, v] : params) j[name] = v;
    return j;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

const char* const kScoreColumns[] = {"correct_detection", "over_segmentation", "under_segmentation",
                                     "missed", "noise", "correct_plus_over"};

std::string score_cells(const hoover::HooverScores& s)
{
    using detail::format_fixed6;
    return format_fixed6(s.correct_detection.value()) + ',' + format_fixed6(s.over_segmentation.value()) + ',' +
           format_fixed6(s.under_segmentation.value()) + ',' + format_fixed6(s.missed.value()) + ',' +
           format_fixed6(s.noise.value()) + ',' + format_fixed6(s.correct_plus_over());
}

} // namespace

ReportFormat parse_report_format(std::string_view name)
{
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw Error(ErrorKind::invalid_argument, "unknown report format '" + std::string(name) + "'");
}

std::string render_csv(const SweepReport& report)
{
    std::string out;
    for (const auto& name : report.param_names) out += csv_field(name) + ',';
    for (const char* col : kScoreColumns) out += std::string(col) + ',';
    out += "error\n";
    for (const auto& row : report.rows) {
        for (const auto& [name, v] : row.params) out += detail::format_double(v) + ',';
        out += row.scores ? score_cells(*row.scores) : std::string(",,,,,");
        out += ',' + csv_field(row.error) + '\n';
    }
    return out;
}

std::string render_json(const SweepReport& report)
{
    ojson j;
    j["algorithm"] = std::string(to_string(report.algorithm));
    j["threshold"] = report.threshold;
    j["parameters"] = report.param_names;
    ojson rows = ojson::array();
    for (const auto& row : report.rows) {
        ojson r;
        r["params"] = params_json(row.params);
        r["status"] = row.scores ? "ok" : "error";
        r["scores"] = row.scores ? scores_json(*row.scores) : ojson(nullptr);
        r["error"] = row.scores ? ojson(nullptr) : ojson(row.error);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    if (report.optimum) {
        ojson o;
        o["row"] = *report.optimum;
        o["params"] = params_json(report.rows.at(*report.optimum).params);
        j["optimum"] = std::move(o);
    } else {
        j["optimum"] = nullptr;
    }
    return j.dump(2) + '\n';
}

SweepReport report_from_json(std::string_view json_text)
{
    SweepReport report;
    try {
        const ojson j = ojson::parse(json_text);
        report.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        report.threshold = j.at("threshold").get<double>();
        report.param_names = j.at("parameters").get<std::vector<std::string>>();
        for (const auto& r : j.at("rows")) {
            SweepRow row;
            for (const auto& [name, v] : r.at("params").items()) row.params.emplace_back(name, v.get<double>());
            if (r.at("status").get<std::string>() == "ok") {
                row.scores = scores_from_json(r.at("scores"));
            } else {
                row.error = r.at("error").get<std::string>();
            }
            report.rows.push_back(std::move(row));
        }
        if (!j.at("optimum").is_null()) report.optimum = j.at("optimum").at("row").get<std::size_t>();
    } catch (const ojson::exception& e) {
        throw Error(ErrorKind::malformed_header, std::string("malformed sweep report: ") + e.what());
    }
    return report;
}

void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path)
{
    io::write_file(path, format == ReportFormat::csv ? render_csv(report) : render_json(report));
}

std::string render_evaluation_json(const hoover::Evaluation& evaluation,
                                   const std::optional<ExternalMaskMetadata>& source)
{
    const auto& c = evaluation.classification;
    ojson j;
    j["threshold"] = evaluation.scores.threshold;
    j["scores"] = scores_json(evaluation.scores);

    ojson inst;
    inst["correct"] = ojson::array();
    for (const auto& [g, m] : c.correct) inst["correct"].push_back({{"gt", g}, {"ms", m}});
    inst["over"] = ojson::array();
    for (const auto& o : c.over) inst["over"].push_back({{"gt", o.gt}, {"ms", o.ms}});
    inst["under"] = ojson::array();
    for (const auto& u : c.under) inst["under"].push_back({{"ms", u.ms}, {"gt", u.gt}});
    inst["missed"] = c.missed;
    inst["noise"] = c.noise;
    j["instances"] = std::move(inst);

    if (source) {
        ojson s;
        s["source"] = source->source;
        s["parameters"] = ojson::object();
        for (const auto& [k, v] : source->parameters) s["parameters"][k] = v;
        j["external_mask"] = std::move(s);
    }
    return j.dump(2) + '\n';
}

std::string render_evaluation_csv(const hoover::HooverScores& scores)
{
    std::string out;
    for (const char* col : kScoreColumns) out += std::string(col) + ',';
    out.back() = '\n';
    return out + score_cells(scores) + '\n';
}

} // namespace spoilseg::harness
