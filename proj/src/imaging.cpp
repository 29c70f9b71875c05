#include "echoq/imaging.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "binary_io.hpp"

namespace echoq {

using namespace detail;

void validate(const Spacing& spacing)
{
    if (!(spacing.depth > 0.0) || !(spacing.width > 0.0) || !std::isfinite(spacing.depth) ||
        !std::isfinite(spacing.width))
        throw InputError("pixel spacing must be strictly positive");
}

void validate(const GrayImage& img)
{
    validate(img.spacing);
    for (double v : img.pixels.values()) {
        if (img.domain == PixelDomain::Intensity8) {
            if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v))
                throw InputError("value outside domain: B-mode pixels must be integers in [0,255]");
        } else if (!(v >= 0.0 && v <= 1.0)) {
            throw InputError("value outside domain: coherence pixels must lie in [0,1]");
        }
    }
}

GrayImage make_gray(int width, int height, Spacing spacing, PixelDomain domain, double fill)
{
    validate(spacing);
    return GrayImage{Grid<double>(width, height, fill), spacing, domain};
}

bool LabelMask::has(Label l) const
{
    const auto code = label_code(l);
    return std::any_of(labels.values().begin(), labels.values().end(),
                       [code](std::uint8_t v) { return v == code; });
}

void validate(const LabelMask& mask)
{
    validate(mask.spacing);
    if (!mask.sector.same_shape(mask.labels))
        throw ValidationError("sector mask dimensions differ from label mask");
    for (auto v : mask.labels.values())
        if (v > label_code(Label::AO))
            throw InputError("label code " + std::to_string(v) + " outside {0,1,2,3,4}");
}

Mask select(const LabelMask& mask, Label label)
{
    Mask out(mask.width(), mask.height());
    const auto code = label_code(label);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mask.labels[i] == code ? 1 : 0;
    return out;
}

std::array<double, 256> Histogram::normalized() const
{
    if (total == 0) throw InputError("empty histogram");
    std::array<double, 256> p{};
    const double n = static_cast<double>(total);
    for (std::size_t i = 0; i < bins.size(); ++i) p[i] = static_cast<double>(bins[i]) / n;
    return p;
}

Histogram histogram(const GrayImage& img, const Mask& mask)
{
    if (img.domain != PixelDomain::Intensity8)
        throw InputError("histogram requires an 8-bit intensity image");
    if (!mask.same_shape(img.pixels)) throw ValidationError("mask dimensions differ from image");
    Histogram h;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const double v = img.pixels[i];
        if (!(v >= 0.0 && v <= 255.0)) throw InputError("value outside domain");
        ++h.bins[static_cast<std::size_t>(v)];
        ++h.total;
    }
    if (h.total == 0) throw InputError("empty mask");
    return h;
}

std::array<std::uint8_t, 256> histogram_match_table(const Histogram& source, double target_mean,
                                                    double target_std)
{
    if (source.total == 0) throw InputError("histogram matching: empty sector");
    if (!(target_std > 0.0)) throw InputError("histogram matching: target std must be positive");

    const boost::math::normal_distribution<double> target(target_mean, target_std);
    const double n = static_cast<double>(source.total);
    std::array<std::uint8_t, 256> table{};
    std::uint64_t below = 0;
    for (std::size_t v = 0; v < 256; ++v) {
        const double f = (static_cast<double>(below) + 0.5 * static_cast<double>(source.bins[v])) / n;
        double q;
        if (f <= 0.0)
            q = 0.0;
        else if (f >= 1.0)
            q = 255.0;
        else
            q = std::clamp(boost::math::quantile(target, f), 0.0, 255.0);
        table[v] = static_cast<std::uint8_t>(std::lround(q));
        below += source.bins[v];
    }
    return table;
}

GrayImage histogram_match(const GrayImage& img, const Mask& sector, double target_mean,
                          double target_std)
{
    validate(img);
    if (img.domain != PixelDomain::Intensity8)
        throw InputError("histogram matching requires an 8-bit intensity image");
    if (!sector.same_shape(img.pixels)) throw ValidationError("sector dimensions differ from image");

    Histogram src;
    for (std::size_t i = 0; i < sector.size(); ++i) {
        if (!sector[i]) continue;
        ++src.bins[static_cast<std::size_t>(img.pixels[i])];
        ++src.total;
    }
    if (src.total == 0) throw InputError("histogram matching: empty sector");

    const auto table = histogram_match_table(src, target_mean, target_std);
    GrayImage out = img;
    for (auto& v : out.pixels.values()) v = table[static_cast<std::size_t>(v)];
    return out;
}

// ---- PGM -------------------------------------------------------------------

std::string encode_pgm(const Grid<std::uint8_t>& grid)
{
    std::string out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(grid.values().data()), grid.size());
    return out;
}

Grid<std::uint8_t> decode_pgm(std::string_view bytes)
{
    Reader in(bytes);
    in.expect("P5");
    // A comment may follow the magic on the first line.
    while (!in.at_end() && (in.peek() == ' ' || in.peek() == '\t')) in.get();
    if (!in.at_end() && in.peek() == '#')
        while (in.get() != '\n') {
        }
    const long long w = parse_int(in.token());
    const long long h = parse_int(in.token());
    const long long maxval = parse_int(in.token());
    if (maxval != 255) throw InputError("malformed header: maxval must be 255");
    check_dimensions(w, h);
    single_whitespace(in);
    const auto n = static_cast<std::size_t>(w * h);
    auto data = in.take(n);
    if (!in.at_end()) throw InputError("trailing data after pixel block");
    std::vector<std::uint8_t> values(data.begin(), data.end());
    return Grid<std::uint8_t>(static_cast<int>(w), static_cast<int>(h), std::move(values));
}

// ---- CIMG1 -----------------------------------------------------------------

std::string encode_cimg(const GrayImage& img)
{
    validate(img);
    std::string out = "CIMG1\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                      " " + format_double(img.spacing.depth) + " " +
                      format_double(img.spacing.width) + "\n";
    const std::size_t header = out.size();
    out.resize(header + 4 * img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        store_le_float(out.data() + header + 4 * i, static_cast<float>(img.pixels[i]));
    return out;
}

GrayImage decode_cimg(std::string_view bytes)
{
    Reader in(bytes);
    in.expect("CIMG1\n");
    const long long w = parse_int(in.token());
    const long long h = parse_int(in.token());
    const double sd = parse_double(in.token());
    const double sw = parse_double(in.token());
    check_dimensions(w, h);
    if (in.get() != '\n') throw InputError("malformed header: expected newline");
    const auto n = static_cast<std::size_t>(w * h);
    auto data = in.take(4 * n);
    if (!in.at_end()) throw InputError("trailing data after pixel block");

    GrayImage img{Grid<double>(static_cast<int>(w), static_cast<int>(h)), Spacing{sd, sw},
                  PixelDomain::Unit};
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = load_le_float(data.data() + 4 * i);
    validate(img);
    return img;
}

// ---- files -----------------------------------------------------------------

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw InputError("write failed for '" + path.string() + "'");
}

GrayImage load_gray(const std::filesystem::path& path, Spacing spacing)
{
    const std::string bytes = read_file(path);
    if (bytes.rfind("CIMG1", 0) == 0) return decode_cimg(bytes);
    if (bytes.rfind("P5", 0) != 0) throw InputError("malformed header: unknown image format");
    validate(spacing);
    auto grid = decode_pgm(bytes);
    GrayImage img{Grid<double>(grid.width(), grid.height()), spacing, PixelDomain::Intensity8};
    for (std::size_t i = 0; i < grid.size(); ++i) img.pixels[i] = grid[i];
    return img;
}

void save_gray(const std::filesystem::path& path, const GrayImage& img)
{
    validate(img);
    if (img.domain == PixelDomain::Unit) {
        write_file(path, encode_cimg(img));
        return;
    }
    Grid<std::uint8_t> grid(img.width(), img.height());
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = static_cast<std::uint8_t>(img.pixels[i]);
    write_file(path, encode_pgm(grid));
}

Grid<std::uint8_t> sector_to_pgm(const Mask& sector)
{
    Grid<std::uint8_t> out(sector.width(), sector.height());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sector[i] ? 255 : 0;
    return out;
}

Mask sector_from_pgm(const Grid<std::uint8_t>& grid)
{
    Mask out(grid.width(), grid.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (grid[i] != 0 && grid[i] != 255)
            throw InputError("sector mask values must be 0 or 255");
        out[i] = grid[i] ? 1 : 0;
    }
    return out;
}

LabelMask load_label_mask(const std::filesystem::path& labels,
                          const std::optional<std::filesystem::path>& sector, Spacing spacing)
{
    LabelMask mask;
    mask.labels = decode_pgm(read_file(labels));
    mask.spacing = spacing;
    if (sector)
        mask.sector = sector_from_pgm(decode_pgm(read_file(*sector)));
    else
        mask.sector = Mask(mask.labels.width(), mask.labels.height(), 1);
    validate(mask);
    return mask;
}

void save_label_mask(const std::filesystem::path& labels, const std::filesystem::path& sector,
                     const LabelMask& mask)
{
    validate(mask);
    write_file(labels, encode_pgm(mask.labels));
    write_file(sector, encode_pgm(sector_to_pgm(mask.sector)));
}

} // namespace echoq
