#include "echoq/imgcmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace echoq {

namespace {

void check_pair(const GrayImage& a, const GrayImage& b)
{
    if (!a.pixels.same_shape(b.pixels)) throw ValidationError("dimension mismatch");
    if (a.pixels.empty()) throw InputError("empty image");
}

// Half-sample symmetric extension: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
int reflect(int i, int n)
{
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_kernel(int size, double sigma)
{
    std::vector<double> k(static_cast<std::size_t>(size));
    const double centre = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double x = i - centre;
        k[static_cast<std::size_t>(i)] = std::exp(-(x * x) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (auto& v : k) v /= sum;
    return k;
}

Grid<double> filter_separable(const Grid<double>& in, const std::vector<double>& k)
{
    const int w = in.width(), h = in.height();
    const int half = static_cast<int>(k.size()) / 2;
    Grid<double> tmp(w, h), out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int j = 0; j < static_cast<int>(k.size()); ++j)
                acc += k[static_cast<std::size_t>(j)] * in(r, reflect(c + j - half, w));
            tmp(r, c) = acc;
        }
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int j = 0; j < static_cast<int>(k.size()); ++j)
                acc += k[static_cast<std::size_t>(j)] * tmp(reflect(r + j - half, h), c);
            out(r, c) = acc;
        }
    return out;
}

} // namespace

double rpe(const GrayImage& target, const GrayImage& pred, double epsilon)
{
    check_pair(target, pred);
    double sum = 0.0;
    for (std::size_t i = 0; i < target.pixels.size(); ++i) {
        const double t = target.pixels[i];
        sum += std::abs(t - pred.pixels[i]) / std::max(t, epsilon);
    }
    return sum / static_cast<double>(target.pixels.size());
}

double psnr(const GrayImage& target, const GrayImage& pred, double max_value)
{
    check_pair(target, pred);
    double sse = 0.0;
    for (std::size_t i = 0; i < target.pixels.size(); ++i) {
        const double d = target.pixels[i] - pred.pixels[i];
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(target.pixels.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_value * max_value / mse);
}

Grid<double> ssim_map(const GrayImage& target, const GrayImage& pred, const SsimOptions& opt)
{
    check_pair(target, pred);
    if (target.width() < opt.window || target.height() < opt.window)
        throw InputError("image smaller than the SSIM window");

    const auto k = gaussian_kernel(opt.window, opt.sigma);
    const Grid<double>& x = target.pixels;
    const Grid<double>& y = pred.pixels;
    Grid<double> xx(x.width(), x.height()), yy(xx), xy(xx);
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_separable(x, k);
    const auto my = filter_separable(y, k);
    const auto mxx = filter_separable(xx, k);
    const auto myy = filter_separable(yy, k);
    const auto mxy = filter_separable(xy, k);

    const double c1 = (opt.k1 * opt.dynamic_range) * (opt.k1 * opt.dynamic_range);
    const double c2 = (opt.k2 * opt.dynamic_range) * (opt.k2 * opt.dynamic_range);
    Grid<double> out(x.width(), x.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double vx = mxx[i] - mx[i] * mx[i];
        const double vy = myy[i] - my[i] * my[i];
        const double cov = mxy[i] - mx[i] * my[i];
        out[i] = ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return out;
}

double ssim(const GrayImage& target, const GrayImage& pred, const SsimOptions& opt)
{
    const auto map = ssim_map(target, pred, opt);
    double sum = 0.0;
    for (double v : map.values()) sum += v;
    return sum / static_cast<double>(map.size());
}

ImageScores compare_images(const GrayImage& target, const GrayImage& pred)
{
    return {ssim(target, pred), psnr(target, pred), rpe(target, pred)};
}

Summary summarize(std::span<const double> values)
{
    Summary s;
    double sum = 0.0;
    for (double v : values)
        if (std::isfinite(v)) {
            sum += v;
            ++s.n;
        }
    if (s.n == 0) return s;
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : values)
        if (std::isfinite(v)) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n));
    return s;
}

} // namespace echoq
