#include "echoq/qmetrics.hpp"

#include <algorithm>
#include <cmath>

namespace echoq {

RegionStats region_stats(const GrayImage& img, const Mask& mask)
{
    if (!mask.same_shape(img.pixels)) throw ValidationError("mask dimensions differ from image");
    RegionStats s;
    double sum = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        sum += img.pixels[i];
        ++s.count;
    }
    if (s.count == 0) throw InputError("empty mask");
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const double d = img.pixels[i] - s.mean;
        ss += d * d;
    }
    s.std = std::sqrt(ss / static_cast<double>(s.count));
    return s;
}

double contrast_ratio(const RegionStats& roi, const RegionStats& bg)
{
    if (bg.mean == 0.0) throw InputError("contrast ratio: zero background mean");
    return roi.mean / bg.mean;
}

double cnr(const RegionStats& roi, const RegionStats& bg)
{
    const double denom = std::sqrt(roi.std * roi.std + bg.std * bg.std);
    if (denom == 0.0) throw InputError("CNR: both regions have zero variance");
    return (roi.mean - bg.mean) / denom;
}

double gcnr(const Histogram& roi, const Histogram& bg)
{
    if (roi.total == 0 || bg.total == 0) throw InputError("empty histogram");
    const auto p = roi.normalized();
    const auto q = bg.normalized();
    double overlap = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) overlap += std::min(p[i], q[i]);
    return std::clamp(1.0 - overlap, 0.0, 1.0);
}

double local_coherence(const GrayImage& coherence, const Mask& mask)
{
    if (coherence.domain != PixelDomain::Unit)
        throw InputError("local coherence requires a coherence-domain image");
    return region_stats(coherence, mask).mean;
}

Mask lumen_background(const LabelMask& mask)
{
    return mask_and(select(mask, Label::LV), mask.sector);
}

std::vector<MetricVector> compute_metric_vector(const GrayImage& bmode,
                                                const std::optional<GrayImage>& coherence,
                                                const RegionSet& regions, const Mask& lumen,
                                                const std::string& frame_id)
{
    if (!lumen.same_shape(bmode.pixels) || !regions.sector.same_shape(bmode.pixels))
        throw ValidationError("dimension mismatch between B-mode image and regions");
    if (coherence && !coherence->pixels.same_shape(bmode.pixels))
        throw ValidationError("dimension mismatch between B-mode and coherence images");
    if (count(lumen) == 0) throw InputError("LV lumen empty");

    const RegionStats bg = region_stats(bmode, lumen);
    const Histogram bg_hist = histogram(bmode, lumen);

    std::vector<MetricVector> out;
    for (RegionId id : kAllRegions) {
        const Mask& m = regions[id];
        if (regions.is_excluded(id) || count(m) == 0) continue;
        const RegionStats roi = region_stats(bmode, m);
        MetricVector v;
        v.frame_id = frame_id;
        v.region = id;
        v.intensity = roi.mean;
        v.cr = contrast_ratio(roi, bg);
        v.cnr = cnr(roi, bg);
        v.gcnr = gcnr(histogram(bmode, m), bg_hist);
        if (coherence) v.coherence = local_coherence(*coherence, m);
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace echoq
