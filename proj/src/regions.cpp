#include "echoq/regions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <tuple>

namespace echoq {

namespace {

constexpr std::array<std::pair<int, int>, 8> kNeighbours8 = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

constexpr std::array<std::string_view, kRegionCount> kRegionNames = {
    "basal_left",  "mid_left",    "apical_left",  "apical_right",
    "mid_right",   "basal_right", "annulus_left", "annulus_right",
};

std::size_t slot(RegionId id) { return static_cast<std::size_t>(id); }

double sq_distance_mm(Point a, Point b, Spacing s)
{
    const double dr = (a.row - b.row) * s.depth;
    const double dc = (a.col - b.col) * s.width;
    return dr * dr + dc * dc;
}

// Row-major order whose column direction flips with the side being processed.
struct SideOrder {
    int column_sign = 1;
    bool operator()(Pixel a, Pixel b) const
    {
        if (a.row != b.row) return a.row < b.row;
        return column_sign * a.col < column_sign * b.col;
    }
};

std::vector<Pixel> pixels_of(const Mask& mask)
{
    std::vector<Pixel> out;
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            if (mask(r, c)) out.push_back({r, c});
    return out;
}

bool touches(const LabelMask& mask, int r, int c, std::uint8_t code)
{
    for (auto [dr, dc] : kNeighbours8) {
        const int rr = r + dr, cc = c + dc;
        if (mask.labels.contains(rr, cc) && mask.labels(rr, cc) == code) return true;
    }
    return false;
}

/// Nearest candidate to `q`; ties resolved with the side order.
Pixel nearest_pixel(std::span<const Pixel> candidates, Point q, Spacing s, int column_sign)
{
    if (candidates.empty()) throw InputError("no candidate pixels");
    const SideOrder order{column_sign};
    Pixel best = candidates.front();
    double best_d = sq_distance_mm(best, q, s);
    for (Pixel p : candidates.subspan(1)) {
        const double d = sq_distance_mm(p, q, s);
        if (d < best_d || (d == best_d && order(p, best))) {
            best = p;
            best_d = d;
        }
    }
    return best;
}

/// Extremum over candidates; several exact maximisers collapse to their
/// centroid so that a symmetric configuration yields a symmetric answer.
template <typename Score>
Point extremal_centroid(std::span<const Pixel> candidates, Score score, bool maximize)
{
    if (candidates.empty()) throw InputError("no candidate pixels");
    double best = maximize ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    std::vector<Pixel> tied;
    for (Pixel p : candidates) {
        const double v = score(p);
        if (maximize ? v > best : v < best) {
            best = v;
            tied.assign(1, p);
        } else if (v == best) {
            tied.push_back(p);
        }
    }
    if (tied.size() == 1) return tied.front();
    double sr = 0.0, sc = 0.0;
    for (Pixel p : tied) {
        sr += p.row;
        sc += p.col;
    }
    const double n = static_cast<double>(tied.size());
    return Point(sr / n, sc / n);
}

std::vector<std::vector<Pixel>> clusters_8(const Mask& mask)
{
    std::vector<std::vector<Pixel>> out;
    Mask seen(mask.width(), mask.height());
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask(r, c) || seen(r, c)) continue;
            std::vector<Pixel> cluster;
            std::vector<Pixel> stack{{r, c}};
            seen(r, c) = 1;
            while (!stack.empty()) {
                Pixel p = stack.back();
                stack.pop_back();
                cluster.push_back(p);
                for (auto [dr, dc] : kNeighbours8) {
                    const int rr = p.row + dr, cc = p.col + dc;
                    if (mask.contains(rr, cc) && mask(rr, cc) && !seen(rr, cc)) {
                        seen(rr, cc) = 1;
                        stack.push_back({rr, cc});
                    }
                }
            }
            out.push_back(std::move(cluster));
        }
    }
    return out;
}

Point centroid(const std::vector<Pixel>& pixels)
{
    double sr = 0.0, sc = 0.0;
    for (Pixel p : pixels) {
        sr += p.row;
        sc += p.col;
    }
    const double n = static_cast<double>(pixels.size());
    return Point(sr / n, sc / n);
}

Mask contact_mask(const LabelMask& mask, Label other)
{
    Mask out(mask.width(), mask.height());
    const auto myo = label_code(Label::MYO);
    const auto code = label_code(other);
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            if (mask.labels(r, c) == myo && touches(mask, r, c, code)) out(r, c) = 1;
    return out;
}

// Largest first; equal sizes keep discovery order.
void sort_by_size(std::vector<std::vector<Pixel>>& clusters)
{
    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

/// Twice the signed area of (p, q, x) in (col, row) coordinates.
double orient(Point p, Point q, Point x)
{
    return (q.col - p.col) * (x.row - p.row) - (q.row - p.row) * (x.col - p.col);
}

struct Cut {
    Point inner;
    Point outer;
    Point from; // segment extended past both ends
    Point to;
};

Cut make_cut(Point inner, Point outer, const char* name)
{
    const double len = std::hypot(outer.row - inner.row, outer.col - inner.col);
    if (len < 1e-9) throw InputError(std::string("degenerate cut line ") + name);
    // The extension keeps a cut from being bypassed along either border.
    const double ur = 1.5 * (outer.row - inner.row) / len, uc = 1.5 * (outer.col - inner.col) / len;
    return {inner, outer, Point(inner.row - ur, inner.col - uc), Point(outer.row + ur, outer.col + uc)};
}

int side_of(const Cut& cut, Point p) { return sign(orient(cut.inner, cut.outer, p)); }

/// Whether the cut segment meets the square of pixel (r, c); boundary contact counts.
bool crosses_pixel(const Cut& cut, int r, int c)
{
    constexpr double eps = 1e-9;
    const std::array<double, 2> o = {cut.from.row, cut.from.col};
    const std::array<double, 2> d = {cut.to.row - cut.from.row, cut.to.col - cut.from.col};
    const std::array<double, 2> lo = {r - 0.5 - eps, c - 0.5 - eps};
    const std::array<double, 2> hi = {r + 0.5 + eps, c + 0.5 + eps};
    double t0 = 0.0, t1 = 1.0;
    for (std::size_t k = 0; k < 2; ++k) {
        if (d[k] == 0.0) {
            if (o[k] < lo[k] || o[k] > hi[k]) return false;
            continue;
        }
        double ta = (lo[k] - o[k]) / d[k], tb = (hi[k] - o[k]) / d[k];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

Point mirror_point(Point p, int width) { return Point(p.row, static_cast<double>(width - 1) - p.col); }

} // namespace

std::string_view to_string(View view)
{
    switch (view) {
    case View::A2C: return "A2C";
    case View::A4C: return "A4C";
    case View::ALAX: return "ALAX";
    }
    return "?";
}

View parse_view(std::string_view text)
{
    if (text == "A2C") return View::A2C;
    if (text == "A4C") return View::A4C;
    if (text == "ALAX") return View::ALAX;
    throw InputError("unknown view '" + std::string(text) + "' (expected A2C, A4C or ALAX)");
}

double distance_mm(Point a, Point b, Spacing spacing) { return std::sqrt(sq_distance_mm(a, b, spacing)); }

std::string_view region_name(RegionId id) { return kRegionNames[slot(id)]; }

RegionId parse_region(std::string_view name)
{
    for (RegionId id : kAllRegions)
        if (region_name(id) == name) return id;
    throw InputError("unknown region '" + std::string(name) + "'");
}

RegionId mirrored(RegionId id)
{
    switch (id) {
    case RegionId::BasalLeft: return RegionId::BasalRight;
    case RegionId::MidLeft: return RegionId::MidRight;
    case RegionId::ApicalLeft: return RegionId::ApicalRight;
    case RegionId::ApicalRight: return RegionId::ApicalLeft;
    case RegionId::MidRight: return RegionId::MidLeft;
    case RegionId::BasalRight: return RegionId::BasalLeft;
    case RegionId::AnnulusLeft: return RegionId::AnnulusRight;
    case RegionId::AnnulusRight: return RegionId::AnnulusLeft;
    }
    return id;
}

std::array<Point, 5> LandmarkSet::inner_points() const
{
    return {apex, endo_left_thirds[0], endo_left_thirds[1], endo_right_thirds[0],
            endo_right_thirds[1]};
}

void check_view(const LabelMask& mask, View view)
{
    validate(mask);
    const bool has_ao = mask.has(Label::AO);
    if (view != View::ALAX && has_ao)
        throw ValidationError("AO label unexpected for view " + std::string(to_string(view)));
    if (view == View::ALAX && !has_ao) throw ValidationError("AO label missing for view ALAX");
    if (!mask.has(Label::MYO)) throw InputError("MYO label missing");
    if (!mask.has(Label::LA)) throw InputError("LA label missing");
    if (!mask.has(Label::LV)) throw InputError("empty LV");
}

std::pair<Point, Point> extract_annulus_points(const LabelMask& mask, View view)
{
    validate(mask);
    Point first, second;
    if (view == View::ALAX) {
        auto ao = clusters_8(contact_mask(mask, Label::AO));
        auto la = clusters_8(contact_mask(mask, Label::LA));
        if (ao.empty() || la.empty()) throw InputError("annulus not found");
        sort_by_size(ao);
        first = centroid(ao.front());
        // The LA contact on the opposite wall from the aorta.
        double far = -1.0;
        for (const auto& cl : la) {
            const Point c = centroid(cl);
            const double d = sq_distance_mm(c, first, mask.spacing);
            if (d > far) {
                far = d;
                second = c;
            }
        }
    } else {
        auto la = clusters_8(contact_mask(mask, Label::LA));
        if (la.size() < 2) throw InputError("annulus not found");
        sort_by_size(la);
        first = centroid(la[0]);
        second = centroid(la[1]);
    }
    if (second.col < first.col || (second.col == first.col && second.row < first.row))
        std::swap(first, second);

    const auto myo = pixels_of(select(mask, Label::MYO));
    const Point left = nearest_pixel(myo, first, mask.spacing, +1);
    const Point right = nearest_pixel(myo, second, mask.spacing, -1);
    return {left, right};
}

Point extract_apex(const LabelMask& mask, std::pair<Point, Point> base)
{
    const Mask lv = select(mask, Label::LV);
    const auto lv_pixels = pixels_of(lv);
    if (lv_pixels.empty()) throw InputError("empty LV");
    const Point mid((base.first.row + base.second.row) / 2.0,
                    (base.first.col + base.second.col) / 2.0);
    const Point apex = extremal_centroid(
        lv_pixels, [&](Pixel p) { return sq_distance_mm(p, mid, mask.spacing); }, true);
    const int r = static_cast<int>(std::lround(apex.row));
    const int c = static_cast<int>(std::lround(apex.col));
    if (!lv.contains(r, c) || !lv(r, c)) {
        // Tied maxima far apart: fall back to the first one in row-major order.
        double best = -1.0;
        Pixel pick = lv_pixels.front();
        for (Pixel p : lv_pixels) {
            const double d = sq_distance_mm(p, mid, mask.spacing);
            if (d > best) {
                best = d;
                pick = p;
            }
        }
        return pick;
    }
    return apex;
}

Mask endocardial_border(const LabelMask& mask)
{
    Mask out(mask.width(), mask.height());
    const auto myo = label_code(Label::MYO);
    const auto lv = label_code(Label::LV);
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            if (mask.labels(r, c) == myo && touches(mask, r, c, lv)) out(r, c) = 1;
    return out;
}

Mask outer_border(const LabelMask& mask)
{
    const Mask endo = endocardial_border(mask);
    const auto myo = label_code(Label::MYO);
    const auto bg = label_code(Label::Background);
    Mask all(mask.width(), mask.height());
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (mask.labels(r, c) != myo) continue;
            bool edge = false;
            for (auto [dr, dc] : kNeighbours8) {
                const int rr = r + dr, cc = c + dc;
                if (!mask.labels.contains(rr, cc) || mask.labels(rr, cc) == bg) {
                    edge = true;
                    break;
                }
            }
            if (edge) all(r, c) = 1;
        }
    }
    Mask strict = all;
    for (std::size_t i = 0; i < strict.size(); ++i)
        if (endo[i]) strict[i] = 0;
    return count(strict) > 0 ? strict : all;
}

std::vector<Pixel> trace_path(const Mask& allowed, Pixel from, Pixel to, Spacing spacing,
                              int column_sign)
{
    if (!allowed.contains(from.row, from.col) || !allowed(from.row, from.col) ||
        !allowed.contains(to.row, to.col) || !allowed(to.row, to.col))
        throw InputError("path endpoints must lie on the border");

    const double diag = std::hypot(spacing.depth, spacing.width);
    const std::size_t n = allowed.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> prev(n, n);

    using Entry = std::tuple<double, int, int, int>; // distance, row, signed column, column
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[allowed.index(from.row, from.col)] = 0.0;
    heap.emplace(0.0, from.row, column_sign * from.col, from.col);
    const std::size_t target = allowed.index(to.row, to.col);

    while (!heap.empty()) {
        const auto [d, r, signed_c, c] = heap.top();
        heap.pop();
        (void)signed_c;
        const std::size_t i = allowed.index(r, c);
        if (d > dist[i]) continue;
        if (i == target) break;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int k = -1; k <= 1; ++k) {
                const int dc = column_sign * k;
                if (dr == 0 && dc == 0) continue;
                const int rr = r + dr, cc = c + dc;
                if (!allowed.contains(rr, cc) || !allowed(rr, cc)) continue;
                const double step = (dr != 0 && dc != 0) ? diag : (dr != 0 ? spacing.depth : spacing.width);
                const std::size_t j = allowed.index(rr, cc);
                if (d + step < dist[j]) {
                    dist[j] = d + step;
                    prev[j] = i;
                    heap.emplace(dist[j], rr, column_sign * cc, cc);
                }
            }
        }
    }
    if (!std::isfinite(dist[target])) throw InputError("disconnected border path");

    std::vector<Pixel> path;
    for (std::size_t i = target; i != n; i = prev[i]) {
        path.push_back({static_cast<int>(i / static_cast<std::size_t>(allowed.width())),
                        static_cast<int>(i % static_cast<std::size_t>(allowed.width()))});
        if (i == allowed.index(from.row, from.col)) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<std::size_t> arclength_split(std::span<const Pixel> path, Spacing spacing,
                                         std::span<const double> fractions)
{
    if (path.empty()) throw InputError("empty border path");
    std::vector<double> cum(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i)
        cum[i] = cum[i - 1] + distance_mm(path[i - 1], path[i], spacing);
    const double total = cum.back();

    std::vector<std::size_t> out;
    out.reserve(fractions.size());
    for (double f : fractions) {
        const double target = f * total;
        std::size_t best = 0;
        double best_err = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cum.size(); ++i) {
            const double err = std::abs(cum[i] - target);
            if (err <= best_err) {
                best = i;
                best_err = err;
            }
        }
        out.push_back(best);
    }
    return out;
}

namespace {

struct Halves {
    std::vector<Pixel> left;  // base_left -> apex
    std::vector<Pixel> right; // base_right -> apex
};

Halves endocardial_halves(const LabelMask& mask, const LandmarkSet& lm)
{
    const Mask border = endocardial_border(mask);
    const auto border_pixels = pixels_of(border);
    if (border_pixels.empty()) throw InputError("empty endocardial border");
    const Spacing sp = mask.spacing;

    const Pixel start_left = nearest_pixel(border_pixels, lm.base_left, sp, +1);
    const Pixel start_right = nearest_pixel(border_pixels, lm.base_right, sp, -1);
    const Pixel apex_left = nearest_pixel(border_pixels, lm.apex, sp, +1);
    const Pixel apex_right = nearest_pixel(border_pixels, lm.apex, sp, -1);

    // Both halves are traced from their base toward the apex so that the two
    // sides run through identical arithmetic under a mirror.
    return {trace_path(border, start_left, apex_left, sp, +1),
            trace_path(border, start_right, apex_right, sp, -1)};
}

std::size_t nearest_index(const std::vector<Pixel>& path, Point q, Spacing sp)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < path.size(); ++i)
        if (sq_distance_mm(path[i], q, sp) < sq_distance_mm(path[best], q, sp)) best = i;
    return best;
}

int basal_rank(RegionId id)
{
    switch (id) {
    case RegionId::BasalLeft:
    case RegionId::BasalRight: return 0;
    case RegionId::MidLeft:
    case RegionId::MidRight: return 1;
    default: return 2;
    }
}

bool left_side(RegionId id)
{
    return id == RegionId::BasalLeft || id == RegionId::MidLeft || id == RegionId::ApicalLeft;
}

// Tie-break between segments that commutes with a mirror: the more basal
// segment wins, then the one on the same side of the long axis as `where`.
struct SegmentPreference {
    Point base_mid;
    Point apex;
    int left_sign;
    // On the axis itself the larger segment wins; left only on an exact tie.
    std::array<std::size_t, kSegmentCount> weight{};

    bool operator()(RegionId a, RegionId b, Point where) const
    {
        if (basal_rank(a) != basal_rank(b)) return basal_rank(a) < basal_rank(b);
        const int s = sign(orient(base_mid, apex, where));
        if (s == 0 && weight[slot(a)] != weight[slot(b)]) return weight[slot(a)] > weight[slot(b)];
        const bool want_left = s == 0 || s == left_sign;
        return left_side(a) == want_left;
    }
};

constexpr std::array<RegionId, 3> kLeftIds = {RegionId::BasalLeft, RegionId::MidLeft,
                                              RegionId::ApicalLeft};
constexpr std::array<RegionId, 3> kRightIds = {RegionId::BasalRight, RegionId::MidRight,
                                               RegionId::ApicalRight};

// Segment of every MYO pixel (-1 elsewhere). The cut segments split MYO into
// 4-connected pieces; a piece takes the segment whose endocardial arc it holds
// most of. Cut pixels, and pieces holding no arc, join the nearest named pixel
// that lies on their side of every cut through them.
Grid<int> partition_myocardium(const LabelMask& mask, const LandmarkSet& lm,
                               const std::array<Cut, 5>& cuts)
{
    const int w = mask.width(), h = mask.height();
    const Spacing sp = mask.spacing;
    const auto myo = label_code(Label::MYO);

    Grid<std::uint8_t> on_cut(w, h, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (mask.labels(r, c) == myo)
                for (std::size_t k = 0; k < cuts.size(); ++k)
                    if (crosses_pixel(cuts[k], r, c)) on_cut(r, c) |= static_cast<std::uint8_t>(1u << k);

    Grid<int> piece(w, h, -1);
    std::vector<std::vector<Pixel>> pieces;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (mask.labels(r, c) != myo || on_cut(r, c) || piece(r, c) >= 0) continue;
            const int id = static_cast<int>(pieces.size());
            std::vector<Pixel> members;
            std::vector<Pixel> stack{{r, c}};
            piece(r, c) = id;
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                members.push_back(p);
                for (auto [dr, dc] : {std::pair{-1, 0}, std::pair{1, 0}, std::pair{0, -1}, std::pair{0, 1}}) {
                    const int rr = p.row + dr, cc = p.col + dc;
                    if (mask.labels.contains(rr, cc) && mask.labels(rr, cc) == myo && !on_cut(rr, cc) &&
                        piece(rr, cc) < 0) {
                        piece(rr, cc) = id;
                        stack.push_back({rr, cc});
                    }
                }
            }
            pieces.push_back(std::move(members));
        }
    }

    const Halves halves = endocardial_halves(mask, lm);
    std::vector<std::array<std::size_t, kSegmentCount>> votes(pieces.size());
    auto vote = [&](const std::vector<Pixel>& path, Point first, Point second,
                    const std::array<RegionId, 3>& ids) {
        std::size_t i1 = nearest_index(path, first, sp), i2 = nearest_index(path, second, sp);
        if (i1 > i2) std::swap(i1, i2);
        for (std::size_t i = 0; i < path.size(); ++i) {
            const int p = piece(path[i].row, path[i].col);
            if (p < 0) continue;
            const RegionId id = ids[static_cast<std::size_t>((i > i1) + (i > i2))];
            ++votes[static_cast<std::size_t>(p)][slot(id)];
        }
    };
    vote(halves.left, lm.endo_left_thirds[0], lm.endo_left_thirds[1], kLeftIds);
    vote(halves.right, lm.endo_right_thirds[1], lm.endo_right_thirds[0], kRightIds);

    const Point base_mid((lm.base_left.row + lm.base_right.row) / 2.0,
                         (lm.base_left.col + lm.base_right.col) / 2.0);
    SegmentPreference prefer{base_mid, lm.apex, sign(orient(base_mid, lm.apex, lm.base_left)), {}};
    for (const auto& v : votes)
        for (std::size_t k = 0; k < kSegmentCount; ++k) prefer.weight[k] += v[k];

    Grid<int> seg(w, h, -1);
    std::vector<std::pair<Pixel, RegionId>> named;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
        std::optional<RegionId> best;
        const Point where = centroid(pieces[p]);
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            if (votes[p][k] == 0) continue;
            const auto id = static_cast<RegionId>(k);
            if (!best || votes[p][k] > votes[p][slot(*best)] ||
                (votes[p][k] == votes[p][slot(*best)] && prefer(id, *best, where)))
                best = id;
        }
        if (!best) continue;
        for (Pixel px : pieces[p]) {
            seg(px.row, px.col) = static_cast<int>(slot(*best));
            named.emplace_back(px, *best);
        }
    }
    if (named.empty()) throw InputError("endocardial border misses the myocardium");
    prefer.weight = {};
    for (const auto& n : named) ++prefer.weight[slot(n.second)];

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (mask.labels(r, c) != myo || seg(r, c) >= 0) continue;
            const Point p(r, c);
            auto same_side = [&](Pixel q) {
                for (std::size_t k = 0; k < cuts.size(); ++k) {
                    if (!(on_cut(r, c) & (1u << k))) continue;
                    const int s = side_of(cuts[k], p);
                    if (s != 0 && side_of(cuts[k], q) != s) return false;
                }
                return true;
            };
            std::optional<std::pair<double, RegionId>> best;
            for (bool constrained : {true, false}) {
                for (const auto& [q, id] : named) {
                    if (constrained && !same_side(q)) continue;
                    const double d = sq_distance_mm(q, p, sp);
                    if (!best || d < best->first || (d == best->first && prefer(id, best->second, p)))
                        best = std::pair{d, id};
                }
                if (best) break;
            }
            seg(r, c) = static_cast<int>(slot(best->second));
        }
    }
    return seg;
}

} // namespace

LandmarkSet divide_endocardium(const LabelMask& mask, LandmarkSet lm)
{
    const Halves halves = endocardial_halves(mask, lm);
    const Spacing sp = mask.spacing;
    const std::array<double, 2> thirds = {1.0 / 3.0, 2.0 / 3.0};
    const auto li = arclength_split(halves.left, sp, thirds);
    const auto ri = arclength_split(halves.right, sp, thirds);
    lm.endo_left_thirds = {halves.left[li[0]], halves.left[li[1]]};
    lm.endo_right_thirds = {halves.right[ri[1]], halves.right[ri[0]]};
    return lm;
}

std::array<Point, 5> match_outer_border(const LabelMask& mask, const std::array<Point, 5>& inner)
{
    const auto outer = pixels_of(outer_border(mask));
    if (outer.empty()) throw InputError("empty outer border");
    const Spacing sp = mask.spacing;
    std::array<Point, 5> out;
    out[0] = extremal_centroid(
        outer, [&](Pixel p) { return sq_distance_mm(p, inner[0], sp); }, false);
    // With a one-pixel wall the outer border falls back to the whole wall, which
    // contains the inner point itself; its match is then a neighbouring pixel.
    for (std::size_t k = 1; k < 5; ++k) {
        std::vector<Pixel> candidates;
        for (Pixel p : outer)
            if (Point(p) != inner[k]) candidates.push_back(p);
        out[k] = nearest_pixel(candidates, inner[k], sp, k < 3 ? +1 : -1);
    }
    return out;
}

RegionSet build_regions(const LabelMask& mask, const LandmarkSet& lm, View view,
                        double annulus_radius_mm)
{
    validate(mask);
    if (!(annulus_radius_mm > 0.0)) throw InputError("annulus radius must be positive");
    const Spacing sp = mask.spacing;
    const Point a = lm.base_left, b = lm.base_right;

    const std::array<Cut, 5> cuts = {
        make_cut(lm.apex, lm.outer_matches[0], "C-H"),
        make_cut(lm.endo_left_thirds[0], lm.outer_matches[1], "D-I"),
        make_cut(lm.endo_left_thirds[1], lm.outer_matches[2], "E-J"),
        make_cut(lm.endo_right_thirds[0], lm.outer_matches[3], "F-K"),
        make_cut(lm.endo_right_thirds[1], lm.outer_matches[4], "G-L"),
    };
    const Grid<int> segment = partition_myocardium(mask, lm, cuts);

    std::array<Mask, kRegionCount> raw;
    for (auto& m : raw) m = Mask(mask.width(), mask.height());
    for (std::size_t i = 0; i < segment.size(); ++i)
        if (segment[i] >= 0) raw[static_cast<std::size_t>(segment[i])][i] = 1;

    // Annulus ellipses: the radius is fixed in mm, so anisotropic spacing stretches them.
    const double r2 = annulus_radius_mm * annulus_radius_mm;
    for (auto [id, centre] : {std::pair{RegionId::AnnulusLeft, a}, std::pair{RegionId::AnnulusRight, b}}) {
        Mask& m = raw[slot(id)];
        for (int r = 0; r < mask.height(); ++r)
            for (int c = 0; c < mask.width(); ++c)
                if (sq_distance_mm(Point(r, c), centre, sp) <= r2) m(r, c) = 1;
    }

    RegionSet out;
    out.view = view;
    out.spacing = sp;
    out.landmarks = lm;
    out.sector = mask.sector;
    for (RegionId id : kAllRegions) {
        const Mask& pre = raw[slot(id)];
        Mask clipped(mask.width(), mask.height());
        std::size_t before = 0, outside = 0;
        for (std::size_t i = 0; i < pre.size(); ++i) {
            if (!pre[i]) continue;
            ++before;
            if (mask.sector[i])
                clipped[i] = 1;
            else
                ++outside;
        }
        out.masks[slot(id)] = std::move(clipped);
        out.pixels_before_clip[slot(id)] = before;
        out.pixels_outside_sector[slot(id)] = outside;
        out.excluded[slot(id)] = mostly_outside(before, outside);
    }
    return out;
}

RegionSet divide_regions(const LabelMask& mask, View view, double annulus_radius_mm)
{
    check_view(mask, view);
    LandmarkSet lm;
    std::tie(lm.base_left, lm.base_right) = extract_annulus_points(mask, view);
    lm.apex = extract_apex(mask, {lm.base_left, lm.base_right});
    lm = divide_endocardium(mask, lm);
    lm.outer_matches = match_outer_border(mask, lm.inner_points());
    return build_regions(mask, lm, view, annulus_radius_mm);
}

LandmarkSet mirror(const LandmarkSet& lm, int width)
{
    auto m = [width](Point p) { return mirror_point(p, width); };
    LandmarkSet out;
    out.base_left = m(lm.base_right);
    out.base_right = m(lm.base_left);
    out.apex = m(lm.apex);
    out.endo_left_thirds = {m(lm.endo_right_thirds[1]), m(lm.endo_right_thirds[0])};
    out.endo_right_thirds = {m(lm.endo_left_thirds[1]), m(lm.endo_left_thirds[0])};
    out.outer_matches = {m(lm.outer_matches[0]), m(lm.outer_matches[4]), m(lm.outer_matches[3]),
                         m(lm.outer_matches[2]), m(lm.outer_matches[1])};
    return out;
}

RegionSet mirror(const RegionSet& rs)
{
    RegionSet out;
    out.view = rs.view;
    out.spacing = rs.spacing;
    out.landmarks = mirror(rs.landmarks, rs.width());
    out.sector = mirror_horizontal(rs.sector);
    for (RegionId id : kAllRegions) {
        const std::size_t to = slot(mirrored(id));
        out.masks[to] = mirror_horizontal(rs[id]);
        out.excluded[to] = rs.excluded[slot(id)];
        out.pixels_before_clip[to] = rs.pixels_before_clip[slot(id)];
        out.pixels_outside_sector[to] = rs.pixels_outside_sector[slot(id)];
    }
    return out;
}

} // namespace echoq
