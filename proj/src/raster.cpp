#include "spoilseg/raster.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "numfmt.hpp"

namespace spoilseg {

std::vector<std::uint32_t> positive_labels(const LabelMap& map)
{
    std::set<std::uint32_t> seen;
    for (auto v : map.data) {
        if (v != 0) seen.insert(v);
    }
    return {seen.begin(), seen.end()};
}

namespace io {

namespace {

constexpr int kMaxDimension = 1 << 20;

struct PnmHeader {
    std::string magic;
    int width = 0;
    int height = 0;
    long maxval = 0;
    std::size_t payload_offset = 0;
};

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderCursor {
public:
    explicit HeaderCursor(std::string_view bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments, then reads a run of non-space bytes.
    std::string_view token(std::string_view what)
    {
        for (;;) {
            while (pos_ < bytes_.size() && is_space(bytes_[pos_])) ++pos_;
            if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        const auto start = pos_;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') ++pos_;
        if (start == pos_) {
            throw Error(ErrorKind::malformed_header, "PNM header ends before " + std::string(what));
        }
        return bytes_.substr(start, pos_ - start);
    }

    long integer(std::string_view what)
    {
        const auto tok = token(what);
        long value = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < 0) {
            throw Error(ErrorKind::malformed_header,
                        "PNM header field " + std::string(what) + " is not a non-negative integer: '" +
                            std::string(tok) + "'");
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t payload_start()
    {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            throw Error(ErrorKind::malformed_header, "PNM header is not terminated by whitespace");
        }
        return pos_ + 1;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

PnmHeader parse_pnm_header(std::string_view bytes, std::string_view expected_magic)
{
    HeaderCursor cursor(bytes);
    PnmHeader h;
    h.magic = std::string(cursor.token("magic number"));
    if (h.magic != expected_magic) {
        throw Error(ErrorKind::malformed_header,
                    "expected magic '" + std::string(expected_magic) + "', found '" + h.magic + "'");
    }
    const long w = cursor.integer("width");
    const long ht = cursor.integer("height");
    h.maxval = cursor.integer("maxval");
    if (w < 1 || ht < 1 || w > kMaxDimension || ht > kMaxDimension) {
        throw Error(ErrorKind::malformed_header,
                    "PNM dimensions out of range: " + std::to_string(w) + "x" + std::to_string(ht));
    }
    h.width = static_cast<int>(w);
    h.height = static_cast<int>(ht);
    h.payload_offset = cursor.payload_start();
    return h;
}

void require_maxval(const PnmHeader& h, long expected)
{
    if (h.maxval != expected) {
        throw Error(ErrorKind::unsupported_maxval,
                    h.magic + " maxval " + std::to_string(h.maxval) + " unsupported (expected " +
                        std::to_string(expected) + ")");
    }
}

std::string_view payload(std::string_view bytes, const PnmHeader& h, std::size_t bytes_per_pixel)
{
    const std::size_t need =
        static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height) * bytes_per_pixel;
    const std::size_t have = bytes.size() - std::min(bytes.size(), h.payload_offset);
    if (have < need) {
        throw Error(ErrorKind::truncated_payload,
                    "pixel payload truncated: expected " + std::to_string(need) + " bytes, found " +
                        std::to_string(have));
    }
    return bytes.substr(h.payload_offset, need);
}

std::string pnm_header(std::string_view magic, int width, int height, int maxval)
{
    return std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
           std::to_string(maxval) + "\n";
}

void require_nonempty(int width, int height, std::size_t count, std::string_view what)
{
    if (width < 1 || height < 1 ||
        count != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorKind::invalid_argument, std::string(what) + " has inconsistent dimensions");
    }
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        const auto start = i;
        while (i < line.size() && !is_space(line[i])) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

double parse_number(std::string_view tok, std::string_view context)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::non_numeric,
                    "non-numeric token '" + std::string(tok) + "' in " + std::string(context));
    }
    return value;
}

long parse_count(std::string_view tok, std::string_view key)
{
    long value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw Error(ErrorKind::non_numeric, "header key " + std::string(key) + " is not an integer");
    }
    if (value < 1 || value > kMaxDimension) {
        throw Error(ErrorKind::malformed_header, "header key " + std::string(key) + " out of range");
    }
    return value;
}

} // namespace

RasterRGB decode_ppm(std::string_view bytes)
{
    const auto h = parse_pnm_header(bytes, "P6");
    require_maxval(h, 255);
    const auto raw = payload(bytes, h, 3);
    RasterRGB img(h.width, h.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        img.data[i] = Rgb{static_cast<std::uint8_t>(raw[3 * i]), static_cast<std::uint8_t>(raw[3 * i + 1]),
                          static_cast<std::uint8_t>(raw[3 * i + 2])};
    }
    return img;
}

std::string encode_ppm(const RasterRGB& image)
{
    require_nonempty(image.width, image.height, image.size(), "RGB raster");
    std::string out = pnm_header("P6", image.width, image.height, 255);
    out.reserve(out.size() + image.size() * 3);
    for (const auto& px : image.data) {
        out.push_back(static_cast<char>(px.r));
        out.push_back(static_cast<char>(px.g));
        out.push_back(static_cast<char>(px.b));
    }
    return out;
}

GrayImage decode_pgm8(std::string_view bytes)
{
    const auto h = parse_pnm_header(bytes, "P5");
    require_maxval(h, 255);
    const auto raw = payload(bytes, h, 1);
    GrayImage img(h.width, h.height);
    std::transform(raw.begin(), raw.end(), img.data.begin(),
                   [](char c) { return static_cast<std::uint8_t>(c); });
    return img;
}

std::string encode_pgm8(const GrayImage& image)
{
    require_nonempty(image.width, image.height, image.size(), "gray image");
    std::string out = pnm_header("P5", image.width, image.height, 255);
    out.append(image.data.begin(), image.data.end());
    return out;
}

LabelMap decode_pgm16(std::string_view bytes)
{
    const auto h = parse_pnm_header(bytes, "P5");
    require_maxval(h, 65535);
    const auto raw = payload(bytes, h, 2);
    LabelMap map(h.width, h.height);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto hi = static_cast<std::uint8_t>(raw[2 * i]);
        const auto lo = static_cast<std::uint8_t>(raw[2 * i + 1]);
        map.data[i] = (static_cast<std::uint32_t>(hi) << 8) | lo;
    }
    return map;
}

std::string encode_pgm16(const LabelMap& map)
{
    require_nonempty(map.width, map.height, map.size(), "label map");
    std::string out = pnm_header("P5", map.width, map.height, 65535);
    out.reserve(out.size() + map.size() * 2);
    for (auto v : map.data) {
        if (v > 65535) {
            throw Error(ErrorKind::label_overflow,
                        "label " + std::to_string(v) + " exceeds the 16-bit range; relabel first");
        }
        out.push_back(static_cast<char>((v >> 8) & 0xff));
        out.push_back(static_cast<char>(v & 0xff));
    }
    return out;
}

ScalarGrid decode_asc_grid(std::string_view text)
{
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            lines.push_back(text.substr(start, end - start));
            start = end + 1;
        }
    }

    std::optional<long> ncols, nrows;
    std::optional<double> cellsize, nodata;
    bool xll = false, yll = false;
    std::size_t line_no = 0;
    for (; line_no < lines.size(); ++line_no) {
        const auto tokens = split_ws(lines[line_no]);
        if (tokens.empty()) continue;
        if (!std::isalpha(static_cast<unsigned char>(tokens[0][0]))) break;
        if (tokens.size() != 2) {
            throw Error(ErrorKind::malformed_header, "header line must be 'key value': '" +
                                                         std::string(lines[line_no]) + "'");
        }
        const auto key = lower(tokens[0]);
        if (key == "ncols") {
            ncols = parse_count(tokens[1], key);
        } else if (key == "nrows") {
            nrows = parse_count(tokens[1], key);
        } else if (key == "xllcorner" || key == "xllcenter") {
            parse_number(tokens[1], key);
            xll = true;
        } else if (key == "yllcorner" || key == "yllcenter") {
            parse_number(tokens[1], key);
            yll = true;
        } else if (key == "cellsize") {
            cellsize = parse_number(tokens[1], key);
        } else if (key == "nodata_value") {
            nodata = parse_number(tokens[1], key);
        } else {
            throw Error(ErrorKind::malformed_header, "unknown header key '" + std::string(tokens[0]) + "'");
        }
    }
    if (!ncols) throw Error(ErrorKind::missing_key, "missing header key ncols");
    if (!nrows) throw Error(ErrorKind::missing_key, "missing header key nrows");
    if (!xll) throw Error(ErrorKind::missing_key, "missing header key xllcorner");
    if (!yll) throw Error(ErrorKind::missing_key, "missing header key yllcorner");
    if (!cellsize) throw Error(ErrorKind::missing_key, "missing header key cellsize");
    if (!(*cellsize > 0.0)) throw Error(ErrorKind::malformed_header, "cellsize must be positive");

    ScalarGrid grid(static_cast<int>(*ncols), static_cast<int>(*nrows));
    grid.cellsize = *cellsize;
    grid.nodata = nodata;
    int row = 0;
    for (; line_no < lines.size(); ++line_no) {
        const auto tokens = split_ws(lines[line_no]);
        if (tokens.empty()) continue;
        if (row >= grid.height) {
            throw Error(ErrorKind::token_count, "more than nrows=" + std::to_string(grid.height) + " data rows");
        }
        if (static_cast<long>(tokens.size()) != *ncols) {
            throw Error(ErrorKind::token_count, "data row " + std::to_string(row) + " has " +
                                                    std::to_string(tokens.size()) + " values, expected " +
                                                    std::to_string(*ncols));
        }
        for (int x = 0; x < grid.width; ++x) {
            grid(x, row) = parse_number(tokens[static_cast<std::size_t>(x)], "data row " + std::to_string(row));
        }
        ++row;
    }
    if (row != grid.height) {
        throw Error(ErrorKind::token_count,
                    "found " + std::to_string(row) + " data rows, expected " + std::to_string(grid.height));
    }
    return grid;
}

std::string encode_asc_grid(const ScalarGrid& grid)
{
    require_nonempty(grid.width, grid.height, grid.size(), "scalar grid");
    if (!(grid.cellsize > 0.0) || !std::isfinite(grid.cellsize)) {
        throw Error(ErrorKind::invalid_argument, "cellsize must be positive and finite");
    }
    std::string out;
    out += "ncols " + std::to_string(grid.width) + "\n";
    out += "nrows " + std::to_string(grid.height) + "\n";
    out += "xllcorner 0\nyllcorner 0\n";
    out += "cellsize " + detail::format_double(grid.cellsize) + "\n";
    if (grid.nodata) out += "NODATA_value " + detail::format_double(*grid.nodata) + "\n";
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const double v = grid(x, y);
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::invalid_argument, "non-finite value cannot be written to an ASCII grid");
            }
            if (x > 0) out.push_back(' ');
            out += detail::format_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::io, "write to '" + path.string() + "' failed");
}

RasterRGB read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }
void write_ppm(const RasterRGB& image, const std::filesystem::path& path) { write_file(path, encode_ppm(image)); }

GrayImage read_pgm8(const std::filesystem::path& path) { return decode_pgm8(read_file(path)); }
void write_pgm8(const GrayImage& image, const std::filesystem::path& path) { write_file(path, encode_pgm8(image)); }

LabelMap read_pgm16(const std::filesystem::path& path) { return decode_pgm16(read_file(path)); }
void write_pgm16(const LabelMap& map, const std::filesystem::path& path) { write_file(path, encode_pgm16(map)); }

ScalarGrid read_asc_grid(const std::filesystem::path& path) { return decode_asc_grid(read_file(path)); }
void write_asc_grid(const ScalarGrid& grid, const std::filesystem::path& path)
{
    write_file(path, encode_asc_grid(grid));
}

} // namespace io

LabelMap relabel_connected(const LabelMap& map, Connectivity connectivity)
{
    static constexpr std::array<std::pair<int, int>, 8> kOffsets{
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};
    const std::size_t n_offsets = connectivity == Connectivity::eight ? 8 : 4;

    LabelMap out(map.width, map.height, 0);
    std::vector<std::pair<int, int>> stack;
    std::uint32_t next = 0;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const auto label = map(x, y);
            if (label == 0 || out(x, y) != 0) continue;
            const auto id = ++next;
            out(x, y) = id;
            stack.assign(1, {x, y});
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (std::size_t k = 0; k < n_offsets; ++k) {
                    const int nx = cx + kOffsets[k].first;
                    const int ny = cy + kOffsets[k].second;
                    if (!map.contains(nx, ny) || map(nx, ny) != label || out(nx, ny) != 0) continue;
                    out(nx, ny) = id;
                    stack.emplace_back(nx, ny);
                }
            }
        }
    }
    return out;
}

} // namespace spoilseg
