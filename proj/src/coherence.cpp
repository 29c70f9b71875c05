#include "echoq/coherence.hpp"

#include <cmath>

#include "binary_io.hpp"
#include "echoq/parallel.hpp"

namespace echoq {

using namespace detail;

ChannelFrame::ChannelFrame(int width, int height, int elements)
    : width_(width), height_(height), elements_(elements)
{
    if (width <= 0 || height <= 0) throw InputError("channel frame dimensions must be positive");
    if (elements < 1) throw InputError("channel frame needs at least one element");
    samples_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                        static_cast<std::size_t>(elements),
                    {0.0, 0.0});
}

std::span<std::complex<double>> ChannelFrame::pixel(int row, int col)
{
    const auto offset = (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                         static_cast<std::size_t>(col)) *
                        static_cast<std::size_t>(elements_);
    return std::span(samples_).subspan(offset, static_cast<std::size_t>(elements_));
}

std::span<const std::complex<double>> ChannelFrame::pixel(int row, int col) const
{
    const auto offset = (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                         static_cast<std::size_t>(col)) *
                        static_cast<std::size_t>(elements_);
    return std::span(samples_).subspan(offset, static_cast<std::size_t>(elements_));
}

double coherence_factor(std::span<const std::complex<double>> signals)
{
    std::complex<double> coherent{0.0, 0.0};
    double incoherent = 0.0;
    for (const auto& s : signals) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw InputError("channel data contains non-finite samples");
        coherent += s;
        incoherent += std::abs(s);
    }
    if (incoherent == 0.0) return 0.0;
    return std::min(1.0, std::abs(coherent) / incoherent);
}

GrayImage coherence_factor(const ChannelFrame& frame, Spacing spacing, int threads)
{
    validate(spacing);
    GrayImage out = make_gray(frame.width(), frame.height(), spacing, PixelDomain::Unit);
    // Stored at float precision so images survive a CIMG1 round trip unchanged.
    parallel_for(static_cast<std::size_t>(frame.height()), threads, [&](std::size_t r) {
        const int row = static_cast<int>(r);
        for (int c = 0; c < frame.width(); ++c)
            out.pixels(row, c) = static_cast<float>(coherence_factor(frame.pixel(row, c)));
    });
    return out;
}

GrayImage gamma_normalize(const GrayImage& coherence, double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be positive");
    GrayImage out = coherence;
    out.domain = PixelDomain::Unit;
    for (auto& v : out.pixels.values()) {
        if (v < 0.0 || !std::isfinite(v)) throw InputError("gamma normalization: negative pixel");
        if (v > 1.0) throw InputError("gamma normalization: pixel above 1");
        v = static_cast<float>(std::pow(v, gamma));
    }
    return out;
}

std::string encode_chdf(const ChannelFrame& frame)
{
    std::string out = "CHDF1\n" + std::to_string(frame.width()) + " " +
                      std::to_string(frame.height()) + " " + std::to_string(frame.elements()) + "\n";
    const std::size_t header = out.size();
    const auto samples = frame.samples();
    out.resize(header + 8 * samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        store_le_float(out.data() + header + 8 * i, static_cast<float>(samples[i].real()));
        store_le_float(out.data() + header + 8 * i + 4, static_cast<float>(samples[i].imag()));
    }
    return out;
}

ChannelFrame decode_chdf(std::string_view bytes)
{
    Reader in(bytes);
    in.expect("CHDF1\n");
    const long long w = parse_int(in.token());
    const long long h = parse_int(in.token());
    const long long n = parse_int(in.token());
    check_dimensions(w, h);
    if (n < 1 || n > 1 << 16) throw InputError("malformed header: element count out of range");
    if (w * h * n > kMaxPixels) throw InputError("dimension overflow");
    if (in.get() != '\n') throw InputError("malformed header: expected newline");
    ChannelFrame frame(static_cast<int>(w), static_cast<int>(h), static_cast<int>(n));
    auto samples = frame.samples();
    auto data = in.take(8 * samples.size());
    if (!in.at_end()) throw InputError("trailing data after sample block");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const float re = load_le_float(data.data() + 8 * i);
        const float im = load_le_float(data.data() + 8 * i + 4);
        if (!std::isfinite(re) || !std::isfinite(im))
            throw InputError("channel data contains non-finite samples");
        samples[i] = {re, im};
    }
    return frame;
}

ChannelFrame load_channels(const std::filesystem::path& path) { return decode_chdf(read_file(path)); }

void save_channels(const std::filesystem::path& path, const ChannelFrame& frame)
{
    write_file(path, encode_chdf(frame));
}

} // namespace echoq
