#include "echoq/phantom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "echoq/error.hpp"
#include "echoq/rng.hpp"

namespace echoq {

namespace {

double speckle(const CounterRng& rng, std::uint64_t stream, std::size_t index, double mean,
               double std)
{
    const double v = mean + std * rng.normal(stream, index);
    return static_cast<double>(std::lround(std::clamp(v, 0.0, 255.0)));
}

double parse_number(std::string_view text)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InputError("bad number in coherence profile: " + std::string(text));
    return v;
}

// Horizontal position relative to the (sheared) chamber axis.
double axis_offset(const ChamberParams& p, int row, int col)
{
    return col - p.centre_col - p.shear * (p.base_row - row);
}

bool inside_bullet(const ChamberParams& p, int row, int col, double left, double right,
                   double top)
{
    if (row > p.base_row) return false;
    const double x = axis_offset(p, row, col);
    const double hw = x < 0.0 ? left : right;
    if (row >= p.centre_row) return std::abs(x) <= hw;
    const double u = x / hw;
    const double v = (row - p.centre_row) / top;
    return u * u + v * v <= 1.0;
}

} // namespace

std::pair<GrayImage, LabelMask> gen_contrast_phantom(const ContrastParams& p)
{
    auto in_range = [](double m) { return m >= 0.0 && m <= 255.0; };
    if (!in_range(p.roi_mean) || !in_range(p.bg_mean) || !(p.roi_std >= 0.0) ||
        !(p.bg_std >= 0.0) || p.pixels_per_region == 0)
        throw InputError("invalid contrast phantom parameters");

    const double n = static_cast<double>(p.pixels_per_region);
    const double r1 = std::sqrt(n / std::numbers::pi);
    const double r2 = std::sqrt(2.0 * n / std::numbers::pi);
    const int size = 2 * static_cast<int>(std::ceil(r2)) + 8;
    const double centre = (size - 1) / 2.0;

    GrayImage img = make_gray(size, size, Spacing{}, PixelDomain::Intensity8);
    LabelMask mask{Grid<std::uint8_t>(size, size), Mask(size, size, 1), Spacing{}};
    const CounterRng rng(p.seed);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double d2 = (r - centre) * (r - centre) + (c - centre) * (c - centre);
            const std::size_t i = img.pixels.index(r, c);
            if (d2 <= r1 * r1) {
                mask.labels[i] = label_code(Label::LV);
                img.pixels[i] = speckle(rng, 0, i, p.bg_mean, p.bg_std);
            } else if (d2 <= r2 * r2) {
                mask.labels[i] = label_code(Label::MYO);
                img.pixels[i] = speckle(rng, 1, i, p.roi_mean, p.roi_std);
            }
        }
    }
    return {std::move(img), std::move(mask)};
}

ChamberParams default_chamber(int width, int height)
{
    if (width < 64 || height < 64) throw InputError("phantom dimensions must be at least 64");
    ChamberParams p;
    p.centre_col = (width - 1) / 2.0;
    p.half_width_left = p.half_width_right = std::round(0.22 * width);
    p.half_height = std::round(0.3 * height);
    p.wall_left = p.wall_right = p.wall_top = 6.0;
    p.centre_row = std::round(0.08 * height) + p.wall_top + p.half_height;
    p.base_row = p.centre_row + std::round(0.25 * height);
    p.atrium_height = std::min(18.0, height - p.base_row - 3.0);
    p.sector.enabled = true;
    p.sector.apex_row = 0.0;
    p.sector.apex_col = p.centre_col;
    p.sector.left_angle = p.sector.right_angle = 0.75;
    p.sector.radius = 1.5 * height;
    return p;
}

ChamberParams random_chamber(std::uint64_t seed, bool symmetric, int width, int height)
{
    if (width < 64 || height < 64) throw InputError("phantom dimensions must be at least 64");
    if (symmetric && width % 2 != 0) throw InputError("symmetric phantoms need an even width");
    RngStream rng(CounterRng(seed), 7);

    ChamberParams p;
    p.half_width_left = std::round(rng.uniform(0.14, 0.22) * width);
    p.half_width_right = symmetric ? p.half_width_left : std::round(rng.uniform(0.14, 0.22) * width);
    p.half_height = std::round(rng.uniform(0.22, 0.3) * height);
    p.wall_top = std::round(rng.uniform(3.0, 8.0));
    p.wall_left = std::round(rng.uniform(3.0, 8.0));
    p.wall_right = symmetric ? p.wall_left : std::round(rng.uniform(3.0, 8.0));
    p.centre_row = std::round(rng.uniform(0.04, 0.1) * height) + p.wall_top + p.half_height;
    p.base_row = p.centre_row + std::round(rng.uniform(0.15, 0.25) * height);
    p.atrium_height = std::min(std::round(rng.uniform(8.0, 18.0)), height - p.base_row - 3.0);
    if (p.atrium_height < 3.0) {
        p.base_row -= 3.0 - p.atrium_height;
        p.atrium_height = 3.0;
    }

    const double left_extent = p.half_width_left + p.wall_left;
    const double right_extent = p.half_width_right + p.wall_right;
    if (symmetric) {
        p.centre_col = (width - 1) / 2.0;
        p.shear = 0.0;
    } else {
        p.centre_col = std::round((width - 1) / 2.0 + rng.uniform(-0.05, 0.05) * width);
        // Keep the sheared walls two pixels away from the image edge.
        const double rise = p.base_row - (p.centre_row - p.half_height - p.wall_top);
        const double room = std::min(p.centre_col - left_extent, width - 1 - p.centre_col - right_extent) - 2.0;
        const double limit = std::max(0.0, std::min(0.15, room / rise));
        p.shear = rng.uniform(-limit, limit);
    }

    p.sector.enabled = true;
    p.sector.apex_row = -std::round(rng.uniform(0.0, 10.0));
    p.sector.apex_col = p.centre_col;
    p.sector.left_angle = rng.uniform(0.55, 0.9);
    p.sector.right_angle = symmetric ? p.sector.left_angle : rng.uniform(0.55, 0.9);
    p.sector.radius = 1.5 * height;
    return p;
}

Mask sector_mask(const SectorParams& s, int width, int height)
{
    Mask out(width, height, 1);
    if (!s.enabled) return out;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double dr = r - s.apex_row, dc = c - s.apex_col;
            const double angle = std::atan2(dc, dr); // 0 straight down, negative to the left
            const bool inside = dr * dr + dc * dc <= s.radius * s.radius &&
                                angle >= -s.left_angle && angle <= s.right_angle;
            out(r, c) = inside ? 1 : 0;
        }
    }
    return out;
}

ChamberPhantom gen_chamber_phantom(View view, int width, int height, Spacing spacing,
                                   const ChamberParams& p)
{
    if (width < 64 || height < 64) throw InputError("phantom dimensions must be at least 64");
    validate(spacing);
    if (!(p.half_width_left >= 2.0 && p.half_width_right >= 2.0 && p.half_height >= 2.0 &&
          p.wall_left >= 1.0 && p.wall_right >= 1.0 && p.wall_top >= 1.0 &&
          p.atrium_height >= 2.0 && p.base_row > p.centre_row))
        throw InputError("invalid chamber parameters");

    LabelMask mask{Grid<std::uint8_t>(width, height), sector_mask(p.sector, width, height), spacing};
    const double left_outer = p.half_width_left + p.wall_left;
    const double right_outer = p.half_width_right + p.wall_right;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            Label l = Label::Background;
            if (inside_bullet(p, r, c, p.half_width_left, p.half_width_right, p.half_height)) {
                l = Label::LV;
            } else if (inside_bullet(p, r, c, left_outer, right_outer, p.half_height + p.wall_top)) {
                l = Label::MYO;
            } else if (r > p.base_row && r <= p.base_row + p.atrium_height) {
                const double x = axis_offset(p, r, c);
                if (view == View::ALAX) {
                    // Atrium under the left wall, aorta under the right, split by a gap.
                    if (x >= -left_outer && x <= -2.0)
                        l = Label::LA;
                    else if (x >= 2.0 && x <= right_outer)
                        l = Label::AO;
                } else if (x >= -left_outer && x <= right_outer) {
                    l = Label::LA;
                }
            }
            mask.labels(r, c) = label_code(l);
        }
    }

    const double base = std::floor(p.base_row);
    const double shift = p.shear * (p.base_row - base);
    ChamberPhantom out{std::move(mask), {}, {}};
    out.base_left = Point(base, p.centre_col + shift - p.half_width_left - p.wall_left / 2.0);
    out.base_right = Point(base, p.centre_col + shift + p.half_width_right + p.wall_right / 2.0);
    return out;
}

CoherenceProfile CoherenceProfile::constant(double cf)
{
    if (!(cf >= 0.0 && cf <= 1.0)) throw InputError("coherence must lie in [0, 1]");
    return {Kind::Prescribed, [cf](int, int) { return cf; }};
}

CoherenceProfile CoherenceProfile::column_gradient(double left, double right, int width)
{
    if (!(left >= 0.0 && left <= 1.0 && right >= 0.0 && right <= 1.0))
        throw InputError("coherence must lie in [0, 1]");
    const double span = width > 1 ? width - 1.0 : 1.0;
    return {Kind::Prescribed, [=](int, int col) { return left + (right - left) * col / span; }};
}

CoherenceProfile CoherenceProfile::random_phase() { return {Kind::RandomPhase, {}}; }

CoherenceProfile CoherenceProfile::parse(std::string_view text, int width)
{
    if (text == "random") return random_phase();
    if (text.starts_with("constant:")) return constant(parse_number(text.substr(9)));
    if (text.starts_with("gradient:")) {
        const auto rest = text.substr(9);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw InputError("gradient profile needs two values");
        return column_gradient(parse_number(rest.substr(0, colon)), parse_number(rest.substr(colon + 1)),
                               width);
    }
    throw InputError("unknown coherence profile: " + std::string(text));
}

ChannelPhantom gen_channel_phantom(int width, int height, int elements,
                                   const CoherenceProfile& profile, std::uint64_t seed)
{
    if (elements < 1) throw InputError("element count must be at least 1");
    if (width < 1 || height < 1) throw InputError("invalid phantom dimensions");
    const CounterRng rng(seed);
    const double two_pi = 2.0 * std::numbers::pi;
    const bool prescribed = profile.kind == CoherenceProfile::Kind::Prescribed;

    ChannelPhantom out{ChannelFrame(width, height, elements), std::nullopt};
    if (prescribed) out.expected = make_gray(width, height, Spacing{}, PixelDomain::Unit);

    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::size_t px = static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(c);
            auto s = out.frame.pixel(r, c);
            if (!prescribed) {
                for (int e = 0; e < elements; ++e) {
                    const double phase = two_pi * rng.uniform(2, px * static_cast<std::size_t>(elements) + static_cast<std::size_t>(e));
                    s[static_cast<std::size_t>(e)] = std::polar(1.0, phase);
                }
                continue;
            }
            const double cf = profile.value(r, c);
            if (!(cf >= 0.0 && cf <= 1.0)) throw InputError("coherence must lie in [0, 1]");
            out.expected->pixels(r, c) = cf;

            if (elements == 1) {
                if (cf != 0.0 && cf != 1.0)
                    throw InputError("a single element only realises coherence 0 or 1");
                s[0] = cf;
            } else if (elements % 2 == 0) {
                // Half the elements at +phi, half at -phi: |sum| / N = cos(phi).
                const double phi = std::acos(cf);
                for (int e = 0; e < elements; ++e)
                    s[static_cast<std::size_t>(e)] = std::polar(1.0, e % 2 == 0 ? phi : -phi);
            } else {
                // One element at phase 0 plus (N-1)/2 pairs at +-phi.
                const double n = elements;
                const double phi = std::acos(std::clamp((cf * n - 1.0) / (n - 1.0), -1.0, 1.0));
                s[0] = 1.0;
                for (int e = 1; e < elements; ++e)
                    s[static_cast<std::size_t>(e)] = std::polar(1.0, e % 2 == 1 ? phi : -phi);
            }
            // Random per-pixel gain and phase leave the coherence factor unchanged.
            const std::complex<double> gain =
                std::polar(0.5 + 1.5 * rng.uniform(3, px), two_pi * rng.uniform(4, px));
            for (auto& v : s) v *= gain;
        }
    }
    return out;
}

SyntheticFrame gen_synthetic_frame(View view, int width, int height, Spacing spacing,
                                   const ChamberParams& params,
                                   const std::array<double, kRegionCount>& quality,
                                   std::uint64_t seed)
{
    for (double q : quality)
        if (!(q >= 1.0 && q <= 5.0)) throw InputError("quality levels must lie in [1, 5]");

    ChamberPhantom chamber = gen_chamber_phantom(view, width, height, spacing, params);
    SyntheticFrame out{std::move(chamber.mask), {}, {}, {}, quality};
    out.regions = divide_regions(out.mask, view);
    out.bmode = make_gray(width, height, spacing, PixelDomain::Intensity8);
    out.coherence = make_gray(width, height, spacing, PixelDomain::Unit);

    // Per-pixel quality: segment level on MYO, annulus level inside the disks.
    Grid<double> level(width, height, 0.0);
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        const Mask& m = out.regions.masks[k];
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i]) level[i] = quality[k];
    }
    for (std::size_t k = kSegmentCount; k < kRegionCount; ++k) {
        const Mask& m = out.regions.masks[k];
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i]) level[i] = quality[k];
    }

    const CounterRng rng(seed);
    for (std::size_t i = 0; i < level.size(); ++i) {
        if (!out.mask.sector[i]) continue;
        const auto label = static_cast<Label>(out.mask.labels[i]);
        double value = 0.0, coh = 0.0;
        if (level[i] > 0.0) {
            value = speckle(rng, 10, i, 40.0 + 20.0 * level[i], 20.0);
            coh = 0.15 * level[i] + 0.05 * rng.normal(11, i);
        } else if (label == Label::LV || label == Label::LA || label == Label::AO) {
            value = speckle(rng, 10, i, 30.0, 12.0);
            coh = 0.1 + 0.03 * rng.normal(11, i);
        } else {
            value = speckle(rng, 10, i, 55.0, 25.0);
            coh = 0.3 + 0.1 * rng.normal(11, i);
        }
        out.bmode.pixels[i] = value;
        out.coherence.pixels[i] = static_cast<double>(static_cast<float>(std::clamp(coh, 0.0, 1.0)));
    }
    return out;
}

} // namespace echoq
