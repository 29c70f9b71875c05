#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "echoq/grid.hpp"

namespace echoq {

/// Physical pixel size in millimetres. Depth is the row axis, width the column axis.
struct Spacing {
    double depth = 1.0;
    double width = 1.0;

    bool operator==(const Spacing&) const = default;
};

void validate(const Spacing& spacing);

enum class PixelDomain {
    Intensity8, ///< integer grey levels 0..255 (B-mode)
    Unit,       ///< real values in [0, 1] (coherence)
};

struct GrayImage {
    Grid<double> pixels;
    Spacing spacing;
    PixelDomain domain = PixelDomain::Intensity8;

    int width() const noexcept { return pixels.width(); }
    int height() const noexcept { return pixels.height(); }
};

/// Throws InputError if any pixel lies outside the declared domain.
void validate(const GrayImage& img);

GrayImage make_gray(int width, int height, Spacing spacing, PixelDomain domain, double fill = 0.0);

enum class Label : std::uint8_t { Background = 0, LV = 1, MYO = 2, LA = 3, AO = 4 };

constexpr std::uint8_t label_code(Label l) noexcept { return static_cast<std::uint8_t>(l); }

struct LabelMask {
    Grid<std::uint8_t> labels;
    Mask sector; ///< 1 inside the scan sector
    Spacing spacing;

    int width() const noexcept { return labels.width(); }
    int height() const noexcept { return labels.height(); }
    bool has(Label l) const;
};

void validate(const LabelMask& mask);

/// All pixels carrying `label`.
Mask select(const LabelMask& mask, Label label);

struct Histogram {
    std::array<std::uint64_t, 256> bins{};
    std::uint64_t total = 0;

    std::array<double, 256> normalized() const;
};

Histogram histogram(const GrayImage& img, const Mask& mask);

/// Maps intensities onto a Gaussian target through the sector's empirical CDF.
///
/// The source CDF uses the midpoint convention F(v) = (#{<v} + #{=v}/2) / N over
/// pixels inside `sector`; every pixel (inside or not) goes through the same
/// 256-entry table v -> round(clamp(Q(F(v)), 0, 255)), Q the Gaussian quantile.
GrayImage histogram_match(const GrayImage& img, const Mask& sector, double target_mean = 127.0,
                          double target_std = 32.0);

/// The 256-entry lookup table used by histogram_match.
std::array<std::uint8_t, 256> histogram_match_table(const Histogram& source, double target_mean,
                                                    double target_std);

// ---- file formats ---------------------------------------------------------
//
// PGM:   "P5\n<w> <h>\n255\n" followed by w*h bytes (row-major). Comments are
//        only accepted on the magic line.
// CIMG1: "CIMG1\n<w> <h> <spacing_depth> <spacing_width>\n" followed by w*h
//        little-endian float32 values (row-major), each in [0, 1].

std::string encode_pgm(const Grid<std::uint8_t>& grid);
Grid<std::uint8_t> decode_pgm(std::string_view bytes);

std::string encode_cimg(const GrayImage& img);
GrayImage decode_cimg(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Loads a B-mode PGM (with the given spacing) or a CIMG1 file (spacing from its header).
GrayImage load_gray(const std::filesystem::path& path, Spacing spacing = {});
/// Intensity8 images are written as PGM, Unit images as CIMG1.
void save_gray(const std::filesystem::path& path, const GrayImage& img);

/// Label PGM plus an optional sector PGM (0 outside, 255 inside). A missing
/// sector means the whole frame is inside.
LabelMask load_label_mask(const std::filesystem::path& labels,
                          const std::optional<std::filesystem::path>& sector, Spacing spacing);
void save_label_mask(const std::filesystem::path& labels, const std::filesystem::path& sector,
                     const LabelMask& mask);

Grid<std::uint8_t> sector_to_pgm(const Mask& sector);
Mask sector_from_pgm(const Grid<std::uint8_t>& grid);

} // namespace echoq
