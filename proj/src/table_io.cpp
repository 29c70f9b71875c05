#include "echoq/table_io.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

#include "binary_io.hpp"

namespace echoq {

namespace {

using json = nlohmann::json;

constexpr std::string_view kMetricsHeader = "frame_id,region_id,intensity,cr,cnr,gcnr,coherence";

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

// Non-empty lines with any trailing '\r' removed.
std::vector<std::string_view> lines_of(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
        start = end + 1;
    }
    return out;
}

std::vector<std::vector<std::string_view>> read_table(std::string_view text,
                                                      std::string_view header, const char* what)
{
    const auto lines = lines_of(text);
    if (lines.empty() || lines.front() != header)
        throw InputError(std::string(what) + ": expected header '" + std::string(header) + "'");
    const std::size_t columns = split_fields(header).size();
    std::vector<std::vector<std::string_view>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_fields(lines[i]);
        if (fields.size() != columns)
            throw InputError(std::string(what) + ": line " + std::to_string(i + 1) + " has " +
                             std::to_string(fields.size()) + " fields");
        rows.push_back(std::move(fields));
    }
    return rows;
}

double number(std::string_view field)
{
    try {
        return detail::parse_double(field);
    } catch (const InputError&) {
        throw InputError("not a number: '" + std::string(field) + "'");
    }
}

std::string_view split_name(Split s)
{
    switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    }
    return "";
}

} // namespace

std::string metrics_to_csv(std::vector<MetricVector> rows)
{
    std::sort(rows.begin(), rows.end(), [](const MetricVector& a, const MetricVector& b) {
        if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
        return a.region < b.region;
    });
    std::string out(kMetricsHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += r.frame_id;
        out += ',';
        out += region_name(r.region);
        for (double v : {r.intensity, r.cr, r.cnr, r.gcnr}) {
            out += ',';
            out += detail::format_double(v);
        }
        out += ',';
        if (r.coherence) out += detail::format_double(*r.coherence);
        out += '\n';
    }
    return out;
}

std::vector<MetricVector> metrics_from_csv(std::string_view text)
{
    std::vector<MetricVector> out;
    for (const auto& f : read_table(text, kMetricsHeader, "metric CSV")) {
        MetricVector m;
        m.frame_id = std::string(f[0]);
        m.region = parse_region(f[1]);
        m.intensity = number(f[2]);
        m.cr = number(f[3]);
        m.cnr = number(f[4]);
        m.gcnr = number(f[5]);
        if (!f[6].empty()) m.coherence = number(f[6]);
        out.push_back(std::move(m));
    }
    return out;
}

std::optional<double> metric_value(const MetricVector& row, std::string_view name)
{
    if (name == "intensity") return row.intensity;
    if (name == "cr") return row.cr;
    if (name == "cnr") return row.cnr;
    if (name == "gcnr") return row.gcnr;
    if (name == "coherence") return row.coherence;
    throw InputError("unknown metric: " + std::string(name));
}

std::vector<QualityRecord> annotations_from_csv(std::string_view text)
{
    std::vector<QualityRecord> out;
    for (const auto& f : read_table(text, "frame_id,region_id,annotator,label", "annotation CSV")) {
        if (f[3] == "oos") continue;
        if (f[3].size() != 1 || f[3][0] < '1' || f[3][0] > '5')
            throw InputError("annotation label must be 1..5 or oos, got '" + std::string(f[3]) + "'");
        parse_region(f[1]);
        out.push_back({std::string(f[0]), std::string(f[1]), Source::annotator(std::string(f[2])),
                       static_cast<double>(f[3][0] - '0')});
    }
    return out;
}

std::vector<QualityRecord> scores_from_csv(std::string_view text, const std::string& method)
{
    std::vector<QualityRecord> out;
    for (const auto& f : read_table(text, "frame_id,region_id,score", "score CSV")) {
        parse_region(f[1]);
        QualityRecord r{std::string(f[0]), std::string(f[1]), Source::method(method), number(f[2])};
        validate(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<Split> SplitManifest::split_of(const std::string& frame_id) const
{
    auto it = frames.find(frame_id);
    if (it == frames.end()) return std::nullopt;
    return it->second;
}

std::size_t SplitManifest::count(Split split) const
{
    return static_cast<std::size_t>(std::count_if(
        frames.begin(), frames.end(), [split](const auto& kv) { return kv.second == split; }));
}

SplitManifest split_from_json(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("split manifest: ") + e.what());
    }
    if (!j.is_object()) throw InputError("split manifest must be a JSON object");
    SplitManifest out;
    for (Split s : {Split::Train, Split::Val, Split::Test}) {
        const std::string key(split_name(s));
        if (!j.contains(key)) continue;
        if (!j[key].is_array()) throw InputError("split '" + key + "' must be an array");
        for (const auto& id : j[key]) {
            if (!id.is_string()) throw InputError("frame ids must be strings");
            auto [it, fresh] = out.frames.emplace(id.get<std::string>(), s);
            if (!fresh)
                throw ValidationError("split leakage: frame " + it->first + " is listed under both " +
                                      std::string(split_name(it->second)) + " and " + key);
        }
    }
    for (const auto& [key, value] : j.items())
        if (key != "train" && key != "val" && key != "test")
            throw InputError("unknown split '" + key + "'");
    return out;
}

std::string split_to_json(const SplitManifest& manifest)
{
    json j = {{"train", json::array()}, {"val", json::array()}, {"test", json::array()}};
    for (const auto& [id, s] : manifest.frames) j[std::string(split_name(s))].push_back(id);
    return j.dump(1) + "\n";
}

} // namespace echoq
