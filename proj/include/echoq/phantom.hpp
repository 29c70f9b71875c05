#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "echoq/coherence.hpp"
#include "echoq/imaging.hpp"
#include "echoq/regions.hpp"

namespace echoq {

// ---- contrast phantom -----------------------------------------------------

struct ContrastParams {
    double roi_mean = 120.0;
    double roi_std = 15.0;
    double bg_mean = 40.0;
    double bg_std = 15.0;
    std::size_t pixels_per_region = 100000;
    std::uint64_t seed = 1;
};

/// LV disk filled with N(bg) and a surrounding MYO ring filled with N(roi),
/// both rounded and clamped to [0, 255]; everything else is background 0.
/// Disk and ring each hold roughly `pixels_per_region` pixels.
std::pair<GrayImage, LabelMask> gen_contrast_phantom(const ContrastParams& params);

// ---- chamber phantom ------------------------------------------------------

/// Scan wedge with its apex at (apex_row, apex_col), opening downward.
/// Angles are measured from the downward vertical, in radians.
struct SectorParams {
    bool enabled = false; ///< disabled: every pixel is inside
    double apex_row = 0.0;
    double apex_col = 0.0;
    double left_angle = 1.0;
    double right_angle = 1.0;
    double radius = 1e9;
};

/// Parametric apical view: a bullet-shaped LV (upper half-ellipse on a
/// rectangle down to `base_row`), a MYO wall around it that is open at the
/// base, and LA (plus AO for ALAX) below the base. `shear` shifts each row
/// horizontally by shear * (base_row - row) pixels.
struct ChamberParams {
    double centre_col = 63.5;
    double centre_row = 60.0;
    double base_row = 96.0;
    double half_width_left = 16.0;
    double half_width_right = 16.0;
    double half_height = 34.0;
    double wall_left = 6.0;
    double wall_right = 6.0;
    double wall_top = 6.0;
    double shear = 0.0;
    double atrium_height = 18.0;
    SectorParams sector;
};

struct ChamberPhantom {
    LabelMask mask;
    Point base_left;  ///< analytic annulus points (arm-tip contact centres)
    Point base_right;
};

ChamberParams default_chamber(int width, int height);

/// Random geometry. Symmetric variants use an even width and a symmetry axis
/// at (width-1)/2, so no pixel centre lies on the axis.
ChamberParams random_chamber(std::uint64_t seed, bool symmetric, int width, int height);

ChamberPhantom gen_chamber_phantom(View view, int width, int height, Spacing spacing,
                                   const ChamberParams& params);

Mask sector_mask(const SectorParams& sector, int width, int height);

// ---- channel phantom ------------------------------------------------------

struct CoherenceProfile {
    enum class Kind { Prescribed, RandomPhase };
    Kind kind = Kind::Prescribed;
    std::function<double(int row, int col)> value; ///< prescribed CF per pixel

    static CoherenceProfile constant(double cf);
    static CoherenceProfile column_gradient(double left, double right, int width);
    static CoherenceProfile random_phase();
    /// "constant:<cf>", "gradient:<left>:<right>" or "random".
    static CoherenceProfile parse(std::string_view text, int width);
};

struct ChannelPhantom {
    ChannelFrame frame;
    std::optional<GrayImage> expected; ///< prescribed CF (absent for random phases)
};

/// Unit-amplitude phasors per pixel arranged so that the coherence factor
/// equals the prescribed value, then scaled by a random per-pixel complex gain.
ChannelPhantom gen_channel_phantom(int width, int height, int elements,
                                   const CoherenceProfile& profile, std::uint64_t seed);

// ---- synthetic frame ------------------------------------------------------

/// A chamber phantom with speckle whose per-region statistics follow a
/// prescribed quality level in [1, 5]; used as an end-to-end corpus.
struct SyntheticFrame {
    LabelMask mask;
    RegionSet regions;
    GrayImage bmode;
    GrayImage coherence;
    std::array<double, kRegionCount> quality{};
};

SyntheticFrame gen_synthetic_frame(View view, int width, int height, Spacing spacing,
                                   const ChamberParams& params,
                                   const std::array<double, kRegionCount>& quality,
                                   std::uint64_t seed);

} // namespace echoq
