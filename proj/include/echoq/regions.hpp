#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "echoq/imaging.hpp"

namespace echoq {

enum class View { A2C, A4C, ALAX };

std::string_view to_string(View view);
View parse_view(std::string_view text);

struct Pixel {
    int row = 0;
    int col = 0;
    bool operator==(const Pixel&) const = default;
};

/// Position in pixel-centre coordinates. Landmarks are usually pixel centres;
/// a landmark chosen among symmetric tied candidates sits at their centroid.
struct Point {
    double row = 0.0;
    double col = 0.0;

    Point() = default;
    Point(double r, double c) : row(r), col(c) {}
    Point(Pixel p) : row(p.row), col(p.col) {}

    bool operator==(const Point&) const = default;
};

double distance_mm(Point a, Point b, Spacing spacing);

enum class RegionId : std::size_t {
    BasalLeft,
    MidLeft,
    ApicalLeft,
    ApicalRight,
    MidRight,
    BasalRight,
    AnnulusLeft,
    AnnulusRight,
};

inline constexpr std::size_t kRegionCount = 8;
inline constexpr std::size_t kSegmentCount = 6;

inline constexpr std::array<RegionId, kRegionCount> kAllRegions = {
    RegionId::BasalLeft,  RegionId::MidLeft,    RegionId::ApicalLeft,  RegionId::ApicalRight,
    RegionId::MidRight,   RegionId::BasalRight, RegionId::AnnulusLeft, RegionId::AnnulusRight,
};

std::string_view region_name(RegionId id);
RegionId parse_region(std::string_view name);
/// The region that `id` becomes after a left-right mirror.
RegionId mirrored(RegionId id);

/// Landmarks of the region division, lettered as in the usual A..L figure:
/// A/B annulus points, C apex, D/E left endocardial thirds (from A), F/G right
/// endocardial thirds (from C), H..L the outer-border matches of C..G.
struct LandmarkSet {
    Point base_left;                        // A
    Point base_right;                       // B
    Point apex;                             // C
    std::array<Point, 2> endo_left_thirds;  // D, E
    std::array<Point, 2> endo_right_thirds; // F, G
    std::array<Point, 5> outer_matches;     // H, I, J, K, L

    /// Inner cut-line endpoints in the order C, D, E, F, G.
    std::array<Point, 5> inner_points() const;
};

struct RegionSet {
    View view = View::A4C;
    Spacing spacing;
    LandmarkSet landmarks;
    std::array<Mask, kRegionCount> masks;                 ///< sector-clipped
    std::array<bool, kRegionCount> excluded{};
    std::array<std::size_t, kRegionCount> pixels_before_clip{};
    std::array<std::size_t, kRegionCount> pixels_outside_sector{};
    Mask sector;

    int width() const noexcept { return sector.width(); }
    int height() const noexcept { return sector.height(); }
    const Mask& operator[](RegionId id) const { return masks[static_cast<std::size_t>(id)]; }
    bool is_excluded(RegionId id) const { return excluded[static_cast<std::size_t>(id)]; }
};

/// Rejects masks whose labels do not fit the view (AO only in ALAX).
void check_view(const LabelMask& mask, View view);

/// Annulus points A (left) and B (right): centroids of the MYO/LA contact
/// clusters (MYO/LA and MYO/AO for ALAX), snapped to the nearest MYO pixel.
std::pair<Point, Point> extract_annulus_points(const LabelMask& mask, View view);

/// LV pixel furthest (in mm) from the midpoint of the base points. Tied
/// maxima are resolved to their centroid.
Point extract_apex(const LabelMask& mask, std::pair<Point, Point> base);

/// Endocardial border pixels: MYO with an 8-neighbour in the LV.
Mask endocardial_border(const LabelMask& mask);

/// Outer MYO border: MYO pixels with an 8-neighbour that is background or
/// outside the image, minus the endocardial border (kept when the wall is so
/// thin that nothing else remains).
Mask outer_border(const LabelMask& mask);

/// Shortest 8-connected path (mm step lengths) through `allowed` from `from` to
/// `to`. Equal-length alternatives are resolved in a row-major order whose
/// column direction is given by `column_sign` (+1 prefers smaller columns),
/// which makes the trace of a mirrored image the mirror of the trace.
/// Throws InputError("disconnected border path") when `to` is unreachable.
std::vector<Pixel> trace_path(const Mask& allowed, Pixel from, Pixel to, Spacing spacing,
                              int column_sign);

/// Indices into `path` nearest the given arclength fractions (mm). Equally
/// near candidates resolve toward the end of the path.
std::vector<std::size_t> arclength_split(std::span<const Pixel> path, Spacing spacing,
                                         std::span<const double> fractions);

/// Traces the endocardium base_left -> apex -> base_right and places D, E, F, G
/// at one and two thirds of the arclength of each half.
LandmarkSet divide_endocardium(const LabelMask& mask, LandmarkSet landmarks);

/// Nearest outer-border pixel for each of C, D, E, F, G (in that order).
std::array<Point, 5> match_outer_border(const LabelMask& mask, const std::array<Point, 5>& inner);

/// Six-segment partition of MYO plus the two annulus ellipses, clipped to the
/// sector, with the >50%-outside exclusion rule applied. The cut segments C-H,
/// D-I, E-J, F-K, G-L split MYO into pieces, and each piece is named after the
/// stretch of endocardium (A..D, D..E, E..C, C..F, F..G, G..B) it contains.
RegionSet build_regions(const LabelMask& mask, const LandmarkSet& landmarks, View view,
                        double annulus_radius_mm = 2.0);

/// The full division: annulus, apex, endocardial thirds, outer matches, regions.
RegionSet divide_regions(const LabelMask& mask, View view, double annulus_radius_mm = 2.0);

/// True when strictly more than half of a region's pixels fall outside the sector.
constexpr bool mostly_outside(std::size_t before_clip, std::size_t outside) noexcept
{
    return before_clip == 0 || 2 * outside > before_clip;
}

LandmarkSet mirror(const LandmarkSet& landmarks, int width);
RegionSet mirror(const RegionSet& regions);

// ---- serialization (schema in docs/regions_json.md) -----------------------

std::vector<std::pair<std::size_t, std::size_t>> rle_encode(const Mask& mask);
Mask rle_decode(const std::vector<std::pair<std::size_t, std::size_t>>& runs, int width,
                int height);

std::string regions_to_json(const RegionSet& regions);
RegionSet regions_from_json(std::string_view text);

} // namespace echoq
