#include <json.hpp>

#include "echoq/regions.hpp"

namespace echoq {

namespace {

using json = nlohmann::json;

constexpr std::string_view kFormat = "echoq-regions/1";

json point_json(Point p) { return json::array({p.row, p.col}); }

Point point_from(const json& j)
{
    if (!j.is_array() || j.size() != 2) throw InputError("landmark must be [row, col]");
    return Point(j[0].get<double>(), j[1].get<double>());
}

json runs_json(const Mask& mask)
{
    json runs = json::array();
    for (auto [start, len] : rle_encode(mask)) runs.push_back(json::array({start, len}));
    return runs;
}

Mask runs_from(const json& j, int width, int height)
{
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (const auto& r : j) {
        if (!r.is_array() || r.size() != 2) throw InputError("run must be [start, length]");
        runs.emplace_back(r[0].get<std::size_t>(), r[1].get<std::size_t>());
    }
    return rle_decode(runs, width, height);
}

} // namespace

std::vector<std::pair<std::size_t, std::size_t>> rle_encode(const Mask& mask)
{
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < mask.size()) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < mask.size() && mask[i]) ++i;
        runs.emplace_back(start, i - start);
    }
    return runs;
}

Mask rle_decode(const std::vector<std::pair<std::size_t, std::size_t>>& runs, int width, int height)
{
    Mask mask(width, height);
    std::size_t last_end = 0;
    for (auto [start, len] : runs) {
        if (len == 0 || start < last_end || start + len > mask.size())
            throw InputError("run-length data out of order or out of bounds");
        for (std::size_t i = start; i < start + len; ++i) mask[i] = 1;
        last_end = start + len;
    }
    return mask;
}

std::string regions_to_json(const RegionSet& rs)
{
    const auto& lm = rs.landmarks;
    json j;
    j["format"] = kFormat;
    j["width"] = rs.width();
    j["height"] = rs.height();
    j["view"] = to_string(rs.view);
    j["spacing"] = {{"depth", rs.spacing.depth}, {"width", rs.spacing.width}};
    j["landmarks"] = {
        {"A", point_json(lm.base_left)},          {"B", point_json(lm.base_right)},
        {"C", point_json(lm.apex)},               {"D", point_json(lm.endo_left_thirds[0])},
        {"E", point_json(lm.endo_left_thirds[1])}, {"F", point_json(lm.endo_right_thirds[0])},
        {"G", point_json(lm.endo_right_thirds[1])}, {"H", point_json(lm.outer_matches[0])},
        {"I", point_json(lm.outer_matches[1])},   {"J", point_json(lm.outer_matches[2])},
        {"K", point_json(lm.outer_matches[3])},   {"L", point_json(lm.outer_matches[4])},
    };
    json regions = json::object();
    for (RegionId id : kAllRegions) {
        const auto k = static_cast<std::size_t>(id);
        regions[std::string(region_name(id))] = {
            {"excluded", rs.excluded[k]},
            {"pixels_before_clip", rs.pixels_before_clip[k]},
            {"pixels_outside_sector", rs.pixels_outside_sector[k]},
            {"rle", runs_json(rs.masks[k])},
        };
    }
    j["regions"] = std::move(regions);
    j["sector"] = {{"rle", runs_json(rs.sector)}};
    return j.dump(1) + "\n";
}

RegionSet regions_from_json(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("regions JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kFormat)
            throw InputError("regions JSON: unsupported format tag");
        RegionSet rs;
        const int w = j.at("width").get<int>();
        const int h = j.at("height").get<int>();
        if (w <= 0 || h <= 0) throw InputError("regions JSON: bad dimensions");
        rs.view = parse_view(j.at("view").get<std::string>());
        rs.spacing = {j.at("spacing").at("depth").get<double>(), j.at("spacing").at("width").get<double>()};
        validate(rs.spacing);
        const auto& l = j.at("landmarks");
        rs.landmarks.base_left = point_from(l.at("A"));
        rs.landmarks.base_right = point_from(l.at("B"));
        rs.landmarks.apex = point_from(l.at("C"));
        rs.landmarks.endo_left_thirds = {point_from(l.at("D")), point_from(l.at("E"))};
        rs.landmarks.endo_right_thirds = {point_from(l.at("F")), point_from(l.at("G"))};
        rs.landmarks.outer_matches = {point_from(l.at("H")), point_from(l.at("I")),
                                      point_from(l.at("J")), point_from(l.at("K")),
                                      point_from(l.at("L"))};
        for (RegionId id : kAllRegions) {
            const auto& r = j.at("regions").at(std::string(region_name(id)));
            const auto k = static_cast<std::size_t>(id);
            rs.masks[k] = runs_from(r.at("rle"), w, h);
            rs.excluded[k] = r.at("excluded").get<bool>();
            rs.pixels_before_clip[k] = r.at("pixels_before_clip").get<std::size_t>();
            rs.pixels_outside_sector[k] = r.at("pixels_outside_sector").get<std::size_t>();
        }
        rs.sector = runs_from(j.at("sector").at("rle"), w, h);
        return rs;
    } catch (const json::exception& e) {
        throw InputError(std::string("regions JSON: ") + e.what());
    }
}

} // namespace echoq
