#pragma once

#include <optional>
#include <string>
#include <vector>

#include "echoq/imaging.hpp"
#include "echoq/regions.hpp"

namespace echoq {

struct RegionStats {
    double mean = 0.0;
    double std = 0.0; ///< population standard deviation
    std::size_t count = 0;
};

RegionStats region_stats(const GrayImage& img, const Mask& mask);

/// roi.mean / bg.mean
double contrast_ratio(const RegionStats& roi, const RegionStats& bg);

/// (roi.mean - bg.mean) / sqrt(roi.std^2 + bg.std^2); signed.
double cnr(const RegionStats& roi, const RegionStats& bg);

/// Generalized CNR: one minus the overlap of the two normalized histograms,
/// 1 - sum_i min(p_roi(i), p_bg(i)). Lies in [0, 1].
double gcnr(const Histogram& roi, const Histogram& bg);

/// Mean coherence over the region.
double local_coherence(const GrayImage& coherence, const Mask& mask);

struct MetricVector {
    std::string frame_id;
    RegionId region = RegionId::BasalLeft;
    double intensity = 0.0;
    double cr = 0.0;
    double cnr = 0.0;
    double gcnr = 0.0;
    std::optional<double> coherence;
};

/// LV pixels inside the sector.
Mask lumen_background(const LabelMask& mask);

/// Metrics for every non-excluded, non-empty region against the full lumen.
/// `bmode` is expected to be histogram matched already.
std::vector<MetricVector> compute_metric_vector(const GrayImage& bmode,
                                                const std::optional<GrayImage>& coherence,
                                                const RegionSet& regions, const Mask& lumen,
                                                const std::string& frame_id = {});

} // namespace echoq
