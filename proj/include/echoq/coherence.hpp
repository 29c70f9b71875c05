#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "echoq/imaging.hpp"

namespace echoq {

/// Delay-compensated element signals, one complex sample per element per pixel.
/// Layout is pixel-major (row-major over pixels), elements contiguous.
class ChannelFrame {
public:
    ChannelFrame() = default;
    ChannelFrame(int width, int height, int elements);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int elements() const noexcept { return elements_; }

    std::span<std::complex<double>> pixel(int row, int col);
    std::span<const std::complex<double>> pixel(int row, int col) const;
    std::span<const std::complex<double>> samples() const noexcept { return samples_; }
    std::span<std::complex<double>> samples() noexcept { return samples_; }

private:
    int width_ = 0;
    int height_ = 0;
    int elements_ = 0;
    std::vector<std::complex<double>> samples_;
};

/// |sum_i S_i| / sum_i |S_i| for one pixel; 0 when every sample is zero.
double coherence_factor(std::span<const std::complex<double>> signals);

/// Per-pixel coherence factor image (Unit domain, before gamma normalization).
GrayImage coherence_factor(const ChannelFrame& frame, Spacing spacing = {}, int threads = 1);

/// t -> t^gamma per pixel.
GrayImage gamma_normalize(const GrayImage& coherence, double gamma = 0.5);

// CHDF1: "CHDF1\n<w> <h> <N>\n" then float32 (re, im) pairs, little-endian,
// pixel-major row-major with the N elements of a pixel contiguous.
std::string encode_chdf(const ChannelFrame& frame);
ChannelFrame decode_chdf(std::string_view bytes);
ChannelFrame load_channels(const std::filesystem::path& path);
void save_channels(const std::filesystem::path& path, const ChannelFrame& frame);

} // namespace echoq
