#pragma once

#include <span>

#include "echoq/imaging.hpp"

namespace echoq {

/// Mean over pixels of |t - p| / max(t, epsilon). Not symmetric in its arguments.
double rpe(const GrayImage& target, const GrayImage& pred, double epsilon = 1e-4);

/// 10 log10(max_value^2 / MSE); +infinity when the images are identical.
double psnr(const GrayImage& target, const GrayImage& pred, double max_value = 1.0);

struct SsimOptions {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Per-pixel SSIM map with a normalized Gaussian window and half-sample
/// symmetric boundary extension.
Grid<double> ssim_map(const GrayImage& target, const GrayImage& pred, const SsimOptions& opt = {});

/// Mean of ssim_map.
double ssim(const GrayImage& target, const GrayImage& pred, const SsimOptions& opt = {});

struct ImageScores {
    double ssim = 0.0;
    double psnr_db = 0.0;
    double rpe = 0.0;
};

ImageScores compare_images(const GrayImage& target, const GrayImage& pred);

struct Summary {
    double mean = 0.0;
    double std = 0.0; ///< population
    std::size_t n = 0;
};

/// Mean and std over the finite values; non-finite entries are skipped.
Summary summarize(std::span<const double> values);

} // namespace echoq
